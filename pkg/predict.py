import hydra
from omegaconf import DictConfig

from torch_lungseg.applications import run_command
from torch_lungseg.applications.predict import run_predict


@hydra.main(version_base=None, config_path="conf", config_name="predict")
def main(cfg: DictConfig):
    return run_command(run_predict, cfg)


if __name__ == "__main__":
    main()
