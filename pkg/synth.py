import hydra
from omegaconf import DictConfig

from torch_lungseg.applications import run_command
from torch_lungseg.applications.synth import run_synth


@hydra.main(version_base=None, config_path="conf", config_name="synth")
def main(cfg: DictConfig):
    return run_command(run_synth, cfg)


if __name__ == "__main__":
    main()
