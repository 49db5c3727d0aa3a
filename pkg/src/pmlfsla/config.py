import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Optional

from django.conf import settings

from .exceptions import ConfigError
from .factorization import HyperParams
from .optics import OpticsParams
from .ranking import DEFAULT_FRACTIONS, RankingMethod

METHOD_CHOICES = {
    "qr": (RankingMethod.QR,),
    "q-only": (RankingMethod.Q_ONLY,),
    "both": (RankingMethod.QR, RankingMethod.Q_ONLY),
}


@dataclass
class RunConfig:
    x: Optional[str] = None
    y: Optional[str] = None
    truth: Optional[str] = None
    dataset: Optional[str] = None
    out_dir: str = "out"
    radius: float = 1.0
    min_pts: int = 5
    k: Optional[int] = None
    alpha: float = 1.0
    beta: float = 1.0
    gamma: float = 1.0
    delta: float = 1.0
    eps_d: float = 1e-8
    eps_div: float = 1e-12
    max_iter: int = 500
    rel_tol: float = 1e-6
    fractions: List[float] = field(default_factory=lambda: list(DEFAULT_FRACTIONS))
    folds: int = 10
    seed: int = 0
    noise_rate: Optional[float] = None
    method: str = "qr"
    trace: bool = False
    plain_frobenius_penalty: bool = False
    grid: bool = False
    n_jobs: int = 1
    random_baselines: int = 0

    def hyper_params(self) -> HyperParams:
        return HyperParams(
            alpha=self.alpha,
            beta=self.beta,
            gamma=self.gamma,
            delta=self.delta,
            eps_d=self.eps_d,
            eps_div=self.eps_div,
            max_iter=self.max_iter,
            rel_tol=self.rel_tol,
            seed=self.seed,
            plain_frobenius=self.plain_frobenius_penalty,
        )

    def optics_params(self) -> OpticsParams:
        return OpticsParams(radius=self.radius, min_pts=self.min_pts)

    def ranking_methods(self):
        return METHOD_CHOICES[self.method]


def load_run_config(flags: dict, config_path=None) -> RunConfig:
    """
    Resolve a run configuration: flags that were given win over the JSON config file,
    which wins over settings.PMLFSLA
    """
    from .serializers import RunConfigSerializer

    data = dict(settings.PMLFSLA)
    if config_path:
        path = Path(config_path)
        try:
            from_file = json.loads(path.read_text(encoding="utf-8"))
        except FileNotFoundError:
            raise ConfigError(f"Config file not found: {path}")
        except json.JSONDecodeError as e:
            raise ConfigError(f"Config file {path} is not valid JSON: {e}")
        if not isinstance(from_file, dict):
            raise ConfigError(f"Config file {path} must hold a JSON object")
        unknown = sorted(set(from_file) - set(RunConfigSerializer().fields))
        if unknown:
            raise ConfigError(f"Unknown keys in {path}: {', '.join(unknown)}")
        data.update(from_file)
    data.update({name: value for name, value in flags.items() if value is not None})

    serializer = RunConfigSerializer(data=data)
    if not serializer.is_valid():
        problems = "; ".join(
            f"{name}: {' '.join(str(message) for message in messages)}" for name, messages in serializer.errors.items()
        )
        raise ConfigError(f"Invalid configuration: {problems}")
    return serializer.save()


def dump_run_config(cfg: RunConfig) -> dict:
    from .serializers import RunConfigSerializer

    return dict(RunConfigSerializer(cfg).data)
