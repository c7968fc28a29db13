import hydra
from omegaconf import DictConfig

from torch_lungseg.applications import run_command
from torch_lungseg.applications.evaluate import run_eval


@hydra.main(version_base=None, config_path="conf", config_name="eval")
def main(cfg: DictConfig):
    return run_command(run_eval, cfg)


if __name__ == "__main__":
    main()
