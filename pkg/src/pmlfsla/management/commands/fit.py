import logging

from pmlfsla.exports import RANKING_FILES, write_disambiguated, write_ranking, write_trace
from pmlfsla.factorization import fit
from pmlfsla.management.base import PmlCommand
from pmlfsla.optics import latent_dim
from pmlfsla.ranking import SCORERS

logger = logging.getLogger(__name__)


class Command(PmlCommand):
    help = "Fit the latent factorization on a dataset and write its feature ranking"

    def add_arguments(self, parser):
        self.add_dataset_arguments(parser)
        self.add_optics_arguments(parser)
        self.add_fit_arguments(parser)
        parser.add_argument("--trace", action="store_true", default=None, help="Write the per-iteration log")

    def run(self, cfg):
        ds = self.load_dataset(cfg)
        k = cfg.k if cfg.k is not None else latent_dim(ds, cfg.optics_params())
        hp = cfg.hyper_params()
        state = fit(ds, k, hp)
        trace = state.objective_trace
        logger.info("Objective %.6g -> %.6g (%.2f%% of initial)", trace[0], trace[-1], 100 * trace[-1] / max(trace[0], hp.eps_div))

        out_dir = self.out_dir(cfg)
        for method in cfg.ranking_methods():
            path = write_ranking(SCORERS[method](state), ds, out_dir / RANKING_FILES[method.value])
            self.stdout.write(f"Wrote {path}")
        write_disambiguated(state, ds, out_dir / "disambiguated.csv")
        if cfg.trace:
            write_trace(state, out_dir / "trace.csv")
        self.write_config(cfg)
        self.stdout.write(f"k={k} iterations={state.iter}")
