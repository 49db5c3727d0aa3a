from pmlfsla.exports import write_reachability
from pmlfsla.management.base import PmlCommand
from pmlfsla.optics import feature_reachability, latent_dim


class Command(PmlCommand):
    help = "Order the feature columns with OPTICS and print the latent dimension k"

    def add_arguments(self, parser):
        self.add_dataset_arguments(parser)
        self.add_optics_arguments(parser)

    def run(self, cfg):
        ds = self.load_dataset(cfg)
        params = cfg.optics_params()
        plot = feature_reachability(ds, params)
        k = latent_dim(ds, params, plot=plot)

        out_dir = self.out_dir(cfg)
        write_reachability(plot, out_dir / "reachability.csv")
        self.write_config(cfg)
        self.stdout.write(f"k={k}")
