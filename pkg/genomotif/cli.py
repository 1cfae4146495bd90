import argparse
import csv
import logging
import os
import re
import sys
from collections.abc import Callable, Sequence
from dataclasses import dataclass, field
from pathlib import Path
from typing import TYPE_CHECKING, Any, NoReturn

from dotenv import find_dotenv, load_dotenv
from pydantic import ValidationError

from genomotif.config import THREADS_ENV, CliConfig
from genomotif.errors import ConfigError, DataError, NonFiniteLoss

if TYPE_CHECKING:
    from genomotif.pipeline import PredictionReport
    from genomotif.seqio import SequenceRecord

logger = logging.getLogger("genomotif")

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2

# BLAS/OpenMP pools read these once, when numpy is first imported
THREAD_ENV_VARS = ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS")

_UNSAFE_FILENAME = re.compile(r"[^A-Za-z0-9_.-]")


class Parser(argparse.ArgumentParser):
    """Argument parser that reports usage errors with exit code 1."""

    def error(self, message: str) -> NoReturn:
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


@dataclass
class Outcome:
    """What a subcommand read and wrote, for the run manifest."""

    manifest_dir: Path
    inputs: list[Path] = field(default_factory=list)
    artifacts: list[Path] = field(default_factory=list)


def _default(name: str) -> object:
    return CliConfig.model_fields[name].default


def _option(group: argparse._ArgumentGroup, *flags: str, dest: str, help: str, **kwargs: Any) -> None:
    group.add_argument(
        *flags,
        dest=dest,
        default=None,
        help=f"{help} (default: {_default(dest)})",
        **kwargs,
    )


def _add_geometry_args(parser: argparse.ArgumentParser) -> None:
    group = parser.add_argument_group("motif geometry")
    _option(group, "--size", dest="size", type=int, metavar="PX", help="Square image size in pixels")
    _option(group, "--max-radius", dest="max_radius", type=int, metavar="PX", help="Circle radius; None = size/2 - 1")
    _option(group, "--fill-mode", dest="fill_mode", choices=["rings", "disk"], help="Pixel fill order")


def _add_susan_args(parser: argparse.ArgumentParser) -> None:
    group = parser.add_argument_group("SUSAN filter")
    _option(group, "--t", "--brightness-threshold", dest="t", type=float, help="Brightness threshold")
    _option(group, "--g", "--geometric-threshold", dest="g", type=float, help="Geometric threshold on the USAN area")
    _option(group, "--output-mode", dest="output_mode", choices=["graded", "binary"], help="Edge output mode")
    _option(group, "--similarity", dest="similarity", choices=["smooth", "hard"], help="Brightness similarity function")
    _option(group, "--border", dest="border", choices=["scaled", "unscaled"], help="Threshold handling at borders")


def _add_quality_args(parser: argparse.ArgumentParser) -> None:
    group = parser.add_argument_group("quality gates")
    _option(group, "--min-length", dest="min_length", type=int, metavar="N", help="Minimum sequence length")
    _option(
        group,
        "--max-ambiguous-fraction",
        dest="max_ambiguous_fraction",
        type=float,
        metavar="F",
        help="Reject at or above this fraction of ambiguous bases",
    )


def _add_network_args(parser: argparse.ArgumentParser) -> None:
    group = parser.add_argument_group("network")
    _option(group, "--growth-rate", dest="growth_rate", type=int, help="Channels added per dense layer")
    _option(group, "--block-layers", dest="block_layers", type=int, help="Layers per dense block")
    _option(group, "--num-blocks", dest="num_blocks", type=int, help="Number of dense blocks")
    _option(group, "--compression", dest="compression", type=float, help="Transition channel compression")
    _option(group, "--dropout", dest="dropout", type=float, help="Dropout rate before the dense head")


def _add_training_args(parser: argparse.ArgumentParser) -> None:
    group = parser.add_argument_group("training")
    _option(group, "--epochs", dest="epochs", type=int, help="Training epochs")
    _option(group, "--batch-size", dest="batch_size", type=int, help="Mini-batch size")
    _option(group, "--lr", dest="lr", type=float, help="RMSProp learning rate")
    _option(group, "--seed", dest="seed", type=int, help="Seed for initialization, shuffling, dropout and split")
    _option(group, "--val-fraction", dest="val_fraction", type=float, help="Validation fraction per region")
    _option(group, "--precision", dest="precision", choices=["float32", "float64"], help="Floating-point precision")


def create_parser() -> argparse.ArgumentParser:
    """Create the argument parser for the genomotif CLI."""
    parser = Parser(
        prog="genomotif",
        description="Encode viral genomes as circular color motifs, filter them with SUSAN and classify by region",
    )
    parser.add_argument("--config", type=Path, metavar="PATH", help="Flat key=value configuration file")
    parser.add_argument(
        "--log-level",
        type=str,
        default="info",
        choices=["debug", "info", "warning", "error", "critical"],
        help="Set the logging level (default: info)",
    )
    parser.add_argument(
        "--threads",
        type=int,
        default=None,
        metavar="N",
        help=f"Worker threads; 1 is bitwise deterministic (default: ${THREADS_ENV} or {_default('threads')})",
    )
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    p = sub.add_parser("ingest", help="Parse FASTA files, apply quality gates, write accepted records")
    p.add_argument("fasta", type=Path, nargs="+", help="FASTA input file(s)")
    p.add_argument("--metadata", type=Path, metavar="CSV", help="Metadata CSV (accession,region,location,date)")
    p.add_argument("-o", "--output", type=Path, required=True, metavar="DIR", help="Output directory")
    _add_quality_args(p)

    p = sub.add_parser("rasterize", help="Write one motif PNG per FASTA record")
    p.add_argument("fasta", type=Path, help="FASTA input file")
    p.add_argument("-o", "--output", type=Path, required=True, metavar="DIR", help="Output directory")
    _add_geometry_args(p)

    p = sub.add_parser("filter", help="Apply the SUSAN edge filter to motif PNGs")
    p.add_argument("inputs", type=Path, nargs="+", help="PNG files or directories of PNG files")
    p.add_argument("-o", "--output", type=Path, required=True, metavar="DIR", help="Output directory")
    p.add_argument("--rgb", action="store_true", help="Write three identical channels instead of grayscale")
    _add_susan_args(p)

    p = sub.add_parser("build-dataset", help="Build a GMD1 dataset from FASTA and metadata")
    p.add_argument("fasta", type=Path, nargs="+", help="FASTA input file(s)")
    p.add_argument("--metadata", type=Path, required=True, metavar="CSV", help="Metadata CSV with region labels")
    p.add_argument("-o", "--output", type=Path, required=True, metavar="FILE", help="Output .gmd1 file")
    _add_quality_args(p)
    _add_geometry_args(p)
    _add_susan_args(p)

    p = sub.add_parser("train", help="Train the classifier on a GMD1 dataset")
    p.add_argument("dataset", type=Path, help="GMD1 dataset")
    p.add_argument("-o", "--output", type=Path, required=True, metavar="DIR", help="Checkpoint and history directory")
    p.add_argument("--resume", type=Path, metavar="CKPT", help="Continue from a checkpoint (e.g. DIR/last.gmnn)")
    _add_network_args(p)
    _add_training_args(p)

    p = sub.add_parser("evaluate", help="Compute metrics of a checkpoint on a GMD1 dataset")
    p.add_argument("model", type=Path, help="GMNN checkpoint")
    p.add_argument("dataset", type=Path, help="GMD1 dataset")
    p.add_argument("-o", "--output", type=Path, required=True, metavar="DIR", help="Metrics output directory")

    for name, help_text in (
        ("predict", "Print per-region percentages for each FASTA record"),
        ("report", "Write per-region percentages for each FASTA record as CSV"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("fasta", type=Path, help="FASTA input file")
        p.add_argument(
            "--model", type=Path, default=Path("best.gmnn"), metavar="CKPT", help="Checkpoint (default: best.gmnn)"
        )
        if name == "report":
            p.add_argument("-o", "--output", type=Path, required=True, metavar="CSV", help="Report CSV")
        else:
            p.add_argument("-o", "--output", type=Path, metavar="FILE", help="Also write the lines to this file")
        _add_quality_args(p)
        _add_geometry_args(p)
        _add_susan_args(p)

    return parser


def parse_args(argv: Sequence[str] | None = None) -> argparse.Namespace:
    """Parse command-line arguments."""
    parser = create_parser()
    return parser.parse_args(argv)


def configure_logging(level: str) -> None:
    """Configure logging for the genomotif package.

    Args:
        level: Log level name (debug, info, warning, error, critical).
    """
    logger = logging.getLogger("genomotif")
    logger.setLevel(getattr(logging, level.upper()))
    logger.propagate = False

    for existing in list(logger.handlers):
        logger.removeHandler(existing)
    handler = logging.StreamHandler()
    handler.setFormatter(
        logging.Formatter(
            fmt="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
            datefmt="%Y-%m-%d %H:%M:%S",
        )
    )
    logger.addHandler(handler)


def apply_threads(threads: int) -> None:
    for var in THREAD_ENV_VARS:
        os.environ[var] = str(threads)


def _safe_name(accession: str) -> str:
    return _UNSAFE_FILENAME.sub("_", accession) or "record"


def _read_records(paths: Sequence[Path]) -> "list[SequenceRecord]":
    from genomotif.seqio import read_fasta

    return [record for path in paths for record in read_fasta(path)]


def cmd_ingest(ns: argparse.Namespace, cfg: CliConfig) -> Outcome:
    from genomotif.seqio import Reject, ambiguous_fraction, quality_filter, read_metadata, with_metadata, write_fasta

    records = _read_records(ns.fasta)
    inputs = list(ns.fasta)
    if ns.metadata is not None:
        metadata = read_metadata(ns.metadata)
        inputs.append(ns.metadata)
        records = [
            with_metadata(r, entry.location, entry.date) if (entry := metadata.get(r.accession)) else r for r in records
        ]

    quality = cfg.quality()
    ns.output.mkdir(parents=True, exist_ok=True)
    accepted_path = ns.output / "accepted.fasta"
    summary_path = ns.output / "ingest.csv"
    accepted = []
    with open(summary_path, "w", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(["accession", "location", "length", "ambiguous_fraction", "status", "reason"])
        for record in records:
            verdict = quality_filter(record, quality)
            reason = verdict.reason.value if isinstance(verdict, Reject) else ""
            status = "rejected" if reason else "accepted"
            fraction = f"{ambiguous_fraction(record.bases):.6f}"
            writer.writerow([record.accession, record.location, len(record), fraction, status, reason])
            if not reason:
                accepted.append(record)
    with open(accepted_path, "w") as f:
        write_fasta(accepted, f)

    logger.info(f"Accepted {len(accepted)} of {len(records)} records")
    return Outcome(ns.output, inputs, [accepted_path, summary_path])


def cmd_rasterize(ns: argparse.Namespace, cfg: CliConfig) -> Outcome:
    from genomotif.motif import MotifManifest, MotifManifestEntry, rasterize, write_png

    geometry = cfg.geometry()
    records = _read_records([ns.fasta])
    ns.output.mkdir(parents=True, exist_ok=True)

    entries = []
    artifacts = []
    for record in records:
        image = rasterize(record.bases, geometry, record.accession)
        path = ns.output / f"{_safe_name(record.accession)}.png"
        write_png(image, path)
        artifacts.append(path)
        entries.append(
            MotifManifestEntry(
                accession=record.accession, file=path.name, capacity=geometry.capacity, truncated=image.truncated
            )
        )
        if image.truncated:
            logger.warning(f"{record.accession}: {image.truncated} bases beyond capacity {geometry.capacity} dropped")

    manifest_file = ns.output / "motifs.json"
    MotifManifest(geometry=geometry, entries=entries).save(manifest_file)
    logger.info(f"Wrote {len(entries)} motif(s) to {ns.output}")
    return Outcome(ns.output, [ns.fasta], [*artifacts, manifest_file])


def _png_inputs(paths: Sequence[Path]) -> list[Path]:
    files: list[Path] = []
    for path in paths:
        if path.is_dir():
            files += sorted(path.glob("*.png"))
        else:
            files.append(path)
    return files


def cmd_filter(ns: argparse.Namespace, cfg: CliConfig) -> Outcome:
    from genomotif.motif import read_png, write_gray_png, write_png
    from genomotif.susan import GrayImage, replicate_channels, susan_edges, to_grayscale

    params = cfg.susan()
    files = _png_inputs(ns.inputs)
    ns.output.mkdir(parents=True, exist_ok=True)

    artifacts = []
    for path in files:
        pixels = read_png(path)
        gray = GrayImage(pixels, path.stem) if pixels.ndim == 2 else to_grayscale(pixels, path.stem)
        filtered = susan_edges(gray, params)
        target = ns.output / path.name
        if ns.rgb:
            write_png(replicate_channels(filtered), target)
        else:
            write_gray_png(filtered.pixels, target)
        artifacts.append(target)

    logger.info(f"Filtered {len(artifacts)} image(s) into {ns.output}")
    return Outcome(ns.output, files, artifacts)


def cmd_build_dataset(ns: argparse.Namespace, cfg: CliConfig) -> Outcome:
    from genomotif.pipeline import build_dataset, file_digest, write_dataset
    from genomotif.pipeline.dataset import manifest_path
    from genomotif.seqio import Reject, quality_filter, read_metadata

    records = _read_records(ns.fasta)
    metadata = read_metadata(ns.metadata)
    quality = cfg.quality()

    accepted = []
    for record in records:
        verdict = quality_filter(record, quality)
        if isinstance(verdict, Reject):
            logger.info(f"Skipping {record.accession}: {verdict.reason}")
        else:
            accepted.append(record)
    logger.info(f"{len(accepted)} of {len(records)} records passed the quality gates")

    inputs = [*ns.fasta, ns.metadata]
    dataset = build_dataset(
        accepted,
        metadata,
        cfg.geometry(),
        cfg.susan(),
        threads=cfg.threads,
        sources={p.name: file_digest(p) for p in inputs},
    )
    ns.output.parent.mkdir(parents=True, exist_ok=True)
    write_dataset(dataset, ns.output)
    logger.info(f"Wrote {len(dataset)} records to {ns.output}: {dataset.histogram()}")
    return Outcome(ns.output.parent, inputs, [ns.output, manifest_path(ns.output)])


def cmd_train(ns: argparse.Namespace, cfg: CliConfig) -> Outcome:
    from genomotif.pipeline import read_dataset, train
    from genomotif.pipeline.training import BEST_CHECKPOINT, HISTORY_FILE, LAST_CHECKPOINT

    dataset = read_dataset(ns.dataset)
    spec = cfg.network_spec(image_size=dataset.image_shape[0])
    result = train(dataset, spec, cfg.train_config(), output_dir=ns.output, resume=ns.resume)
    counts = result.network.parameter_counts()
    logger.info(
        f"Best validation accuracy {result.best_val_accuracy:.4f} at epoch {result.best_epoch}; "
        f"{counts.trainable} trainable, {counts.non_trainable} non-trainable parameters"
    )
    inputs = [ns.dataset] + ([ns.resume] if ns.resume is not None else [])
    artifacts = [ns.output / name for name in (BEST_CHECKPOINT, LAST_CHECKPOINT, HISTORY_FILE)]
    return Outcome(ns.output, inputs, [p for p in artifacts if p.exists()])


def cmd_evaluate(ns: argparse.Namespace, cfg: CliConfig) -> Outcome:
    from genomotif.nn import load_checkpoint
    from genomotif.pipeline import evaluate, read_dataset, render_confusion, write_metrics

    network = load_checkpoint(ns.model).network
    dataset = read_dataset(ns.dataset)
    report = evaluate(network, dataset)
    artifacts = write_metrics(report, ns.output)
    print(render_confusion(report), end="")
    return Outcome(ns.output, [ns.model, ns.dataset], artifacts)


def _predict(ns: argparse.Namespace, cfg: CliConfig) -> "list[PredictionReport]":
    from genomotif.motif import FillMode, MotifGeometry
    from genomotif.nn import load_checkpoint
    from genomotif.pipeline import predict_many

    network = load_checkpoint(ns.model).network
    geometry = cfg.geometry()
    if geometry.width != network.spec.image_size:
        logger.info(f"Using the network's {network.spec.image_size}px geometry instead of --size {geometry.width}")
        geometry = MotifGeometry.square(network.spec.image_size, fill_mode=FillMode(cfg.fill_mode))
    return predict_many(network, _read_records([ns.fasta]), geometry, cfg.susan(), cfg.quality())


def cmd_predict(ns: argparse.Namespace, cfg: CliConfig) -> Outcome:
    lines = [f"{r.accession} {r.line()}" for r in _predict(ns, cfg)]
    for line in lines:
        print(line)
    artifacts = []
    if ns.output is not None:
        ns.output.write_text("".join(f"{line}\n" for line in lines))
        artifacts.append(ns.output)
    return Outcome(ns.output.parent if ns.output is not None else Path.cwd(), [ns.model, ns.fasta], artifacts)


def cmd_report(ns: argparse.Namespace, cfg: CliConfig) -> Outcome:
    from genomotif.pipeline import write_report_csv

    reports = _predict(ns, cfg)
    ns.output.parent.mkdir(parents=True, exist_ok=True)
    write_report_csv(reports, ns.output)
    logger.info(f"Wrote {len(reports)} prediction(s) to {ns.output}")
    return Outcome(ns.output.parent, [ns.model, ns.fasta], [ns.output])


COMMANDS: dict[str, Callable[[argparse.Namespace, CliConfig], Outcome]] = {
    "ingest": cmd_ingest,
    "rasterize": cmd_rasterize,
    "filter": cmd_filter,
    "build-dataset": cmd_build_dataset,
    "train": cmd_train,
    "evaluate": cmd_evaluate,
    "predict": cmd_predict,
    "report": cmd_report,
}


def _overrides(namespace: argparse.Namespace) -> dict[str, object]:
    return {name: getattr(namespace, name) for name in CliConfig.model_fields if hasattr(namespace, name)}


def run(argv: Sequence[str] | None = None) -> int:
    """Run one subcommand and return the process exit code (0 ok, 1 usage, 2 data)."""
    try:
        namespace = parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else EXIT_USAGE
    configure_logging(namespace.log_level)

    try:
        cfg = CliConfig.resolve(namespace.config, _overrides(namespace), os.environ)
    except ConfigError as e:
        print(f"genomotif: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    apply_threads(cfg.threads)

    try:
        outcome = COMMANDS[namespace.command](namespace, cfg)
        from genomotif.pipeline import RunManifest

        manifest = RunManifest.create(
            namespace.command,
            cfg.model_dump(mode="json"),
            outcome.inputs,
            outcome.artifacts,
            base=outcome.manifest_dir,
        )
        manifest.save(outcome.manifest_dir)
    except (DataError, NonFiniteLoss, OSError) as e:
        print(f"genomotif: error: {e}", file=sys.stderr)
        return EXIT_DATA
    except (ConfigError, ValidationError) as e:
        print(f"genomotif: error: invalid option value: {e}", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_OK


def main() -> None:
    """CLI entry point."""
    load_dotenv(find_dotenv(usecwd=True))
    raise SystemExit(run())


if __name__ == "__main__":
    main()
