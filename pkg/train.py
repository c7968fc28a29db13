import hydra
from omegaconf import DictConfig

from torch_lungseg.applications import run_command
from torch_lungseg.applications.train import run_train


@hydra.main(version_base=None, config_path="conf", config_name="train")
def main(cfg: DictConfig):
    return run_command(run_train, cfg)


if __name__ == "__main__":
    main()
