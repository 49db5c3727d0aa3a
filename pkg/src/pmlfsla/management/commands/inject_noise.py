from pathlib import Path

from pmlfsla.data import inject_candidate_noise, load_csv_pair, write_csv_pair
from pmlfsla.exceptions import ConfigError
from pmlfsla.management.base import PmlCommand


class Command(PmlCommand):
    help = (
        "Treat --y as the clean label matrix and add false-positive candidates at --noise-rate. "
        "Writes <stem>.partial.csv and the <stem>.truth.csv sidecar"
    )

    def add_arguments(self, parser):
        self.add_dataset_arguments(parser)
        self.add_noise_arguments(parser)

    def run(self, cfg):
        if cfg.noise_rate is None:
            raise ConfigError("--noise-rate is required")
        if not cfg.x or not cfg.y:
            raise ConfigError("Both --x and --y are required")
        clean = load_csv_pair(cfg.x, cfg.y, name=cfg.dataset)
        partial = inject_candidate_noise(clean, cfg.noise_rate, cfg.seed)

        out_dir = self.out_dir(cfg)
        stem = Path(cfg.y).stem
        partial_path = out_dir / f"{stem}.partial.csv"
        truth_path = out_dir / f"{stem}.truth.csv"
        write_csv_pair(partial, None, partial_path, truth_path)
        self.write_config(cfg)
        self.stdout.write(f"Wrote {partial_path} and {truth_path}")
