import hydra
from omegaconf import DictConfig

from torch_lungseg.applications import run_command
from torch_lungseg.applications.inspect_images import run_inspect


@hydra.main(version_base=None, config_path="conf", config_name="inspect")
def main(cfg: DictConfig):
    return run_command(run_inspect, cfg)


if __name__ == "__main__":
    main()
