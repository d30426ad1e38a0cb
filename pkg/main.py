# main.py - Command line entry point: generate, sample, analyze, sweep and plot

import argparse
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from typing import Dict, List, Optional, Sequence

import numpy as np
from tqdm import tqdm

from analysis import analyze_batch, read_csv, report_row, write_csv
from batch_files import (BatchWriter, expand_inputs, load_circuit, read_batch, stem_paths,
                         write_circuit)
from clifford_circuit import CliffordCircuit
from experiment import (ExperimentCircuit, assemble_experiment, build_context, describe_experiment,
                        experiment_sidecar, gate_count_report)
from experiment_types import (BATCH_EXTENSION, CIRCUIT_EXTENSION, RESULTS_EXTENSION, ConfigError,
                              Encoding, ExperimentSpec, FermistabError, SpecError)
from fermion_encodings import dump_operators
from frame_sampler import iter_blocks, worker_count
from lattice import dump_lattice
from noise import ErrorModel, apply_noise
from plotting import plot_sweep
from settings import Settings, SweepPoint, point_seed, with_overrides
from tableau import reference_sample

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_RUNTIME = 3

RESULTS_NAME = "results" + RESULTS_EXTENSION


def load_settings(args: argparse.Namespace) -> Settings:
    settings = Settings(args.config)
    return with_overrides(settings, args.seed, args.shots, args.out)


def unique_specs(points: Sequence[SweepPoint]) -> List[ExperimentSpec]:
    seen: Dict[ExperimentSpec, None] = {}
    for point in points:
        seen.setdefault(point.spec, None)
    return list(seen)


def resolve_points(settings: Settings, command: str, explain: bool) -> List[SweepPoint]:
    points, skipped = settings.sweep_points()
    for message in skipped:
        print(f"{command}: skipping {message}")
    if not points:
        raise SpecError("no valid experiment in the sweep matrix")
    if explain:
        print(f"{command}: {len(points)} sweep points")
        for index, point in enumerate(points):
            print(f"  [{index}] {point.spec.name()} {point.model.label()} shots={point.shots} "
                  f"seed={point.seed}")
    return points


def write_experiment(out_dir: str, experiment: ExperimentCircuit) -> str:
    """Circuit and sidecar, plus operator and lattice dumps for the compact encoding"""
    spec = experiment.spec
    circuit_path, _ = write_circuit(out_dir, spec.name(), experiment.circuit, experiment_sidecar(experiment))
    if spec.encoding == Encoding.DK:
        ctx = build_context(spec.encoding, spec.size)
        base = os.path.join(out_dir, spec.name())
        with open(base + ".operators.txt", "w") as f:
            f.write(dump_operators(ctx.artifacts))
        with open(base + ".lattice.txt", "w") as f:
            f.write(dump_lattice(ctx.lattice))
    return circuit_path


def sample_to_file(circuit: CliffordCircuit, sidecar: Optional[dict], model: ErrorModel, shots: int,
                   seed: int, path: str, workers: Optional[int] = None, extra: Optional[dict] = None) -> int:
    """Stream noisy sample blocks into a batch file; returns the number of shots written.

    Observables listed as auxiliary signs in the sidecar are split off into
    their own columns.
    """
    aux = list(sidecar.get("aux_sign_observables", [])) if sidecar else []
    logical = circuit.num_observables - len(aux)
    noisy = apply_noise(circuit, model)
    header = {"model": model.name, "p1": model.p1, "p2": model.p2, "ps": model.ps, "pm": model.pm,
              **(extra or {})}
    with BatchWriter(path, circuit.num_detectors, logical, len(aux), seed, header) as writer:
        for detectors, observables in iter_blocks(noisy, shots, seed, workers):
            signs = np.where(observables[:, aux], -1, 1).astype(np.int8) if aux else None
            writer.write(detectors, observables[:, :logical], signs)
        return writer.shots


def analyze_file(path: str, settings: Settings) -> Dict[str, object]:
    batch, header = read_batch(path)
    vqed = batch.aux_signs is not None
    resamples = settings.get_value("vqed_resamples" if vqed else "bootstrap_resamples")
    report = analyze_batch(batch, resamples, header.get("seed", 0), vqed)
    labels = dict(header.get("labels", {}))
    labels.setdefault("name", os.path.splitext(os.path.basename(path))[0])
    labels.setdefault("seed", header.get("seed", 0))
    return report_row(report, labels)


# Commands

def cmd_generate(args: argparse.Namespace) -> int:
    settings = load_settings(args)
    out_dir = settings.get_value("out")
    points = resolve_points(settings, "generate", args.explain)
    for spec in unique_specs(points):
        experiment = assemble_experiment(spec)
        path = write_experiment(out_dir, experiment)
        print(f"generate: {gate_count_report(experiment)}")
        if args.explain:
            print(describe_experiment(experiment))
        print(f"generate: wrote {path}")
    return EXIT_OK


def cmd_sample(args: argparse.Namespace) -> int:
    settings = load_settings(args)
    out_dir = settings.get_value("out")
    models = settings.error_models()
    shots = settings.get_value("shots")
    master = settings.get_value("seed")
    paths = expand_inputs(args.inputs, CIRCUIT_EXTENSION)
    if not paths:
        raise FermistabError("no circuit files to sample")
    os.makedirs(out_dir, exist_ok=True)
    index = 0
    for path in paths:
        circuit, sidecar = load_circuit(path)
        reference_sample(circuit)
        stem = os.path.splitext(os.path.basename(path))[0]
        labels = dict(sidecar.get("labels", {})) if sidecar else {"name": stem}
        for model in models:
            seed = point_seed(master, index)
            index += 1
            target = os.path.join(out_dir, f"{stem}_{model.name}_p{model.p:g}{BATCH_EXTENSION}")
            extra = {"labels": {**labels, "model": model.name, "p": f"{model.p:g}", "seed": seed}}
            written = sample_to_file(circuit, sidecar, model, shots, seed, target, extra=extra)
            print(f"sample: {written} shots of {model.label()} -> {target}")
    return EXIT_OK


def cmd_analyze(args: argparse.Namespace) -> int:
    settings = load_settings(args)
    paths = expand_inputs(args.inputs, BATCH_EXTENSION)
    if not paths:
        raise FermistabError("no batch files to analyze")
    rows = [analyze_file(path, settings) for path in paths]
    out_dir = settings.get_value("out")
    os.makedirs(out_dir, exist_ok=True)
    target = os.path.join(out_dir, RESULTS_NAME)
    write_csv(target, rows)
    excluded = sum(1 for row in rows if row["excluded"] == "true")
    print(f"analyze: {len(rows)} rows ({excluded} excluded) -> {target}")
    return EXIT_OK


def cmd_sweep(args: argparse.Namespace) -> int:
    settings = load_settings(args)
    out_dir = settings.get_value("out")
    points = resolve_points(settings, "sweep", args.explain)
    os.makedirs(out_dir, exist_ok=True)
    settings.save_settings(os.path.join(out_dir, "settings.resolved.json"))

    experiments: Dict[ExperimentSpec, ExperimentCircuit] = {}
    for spec in tqdm(unique_specs(points), desc="generate", unit="circuit"):
        experiments[spec] = assemble_experiment(spec)
        write_experiment(out_dir, experiments[spec])

    pool_size = min(worker_count(), len(points))

    def run(indexed: tuple) -> Dict[str, object]:
        index, point = indexed
        experiment = experiments[point.spec]
        target = stem_paths(out_dir, f"{point.spec.name()}_{point.model.name}_p{point.model.p:g}")["batch"]
        sample_to_file(experiment.circuit, experiment_sidecar(experiment), point.model, point.shots,
                       point.seed, target, workers=1 if pool_size > 1 else None,
                       extra={"labels": point.labels()})
        batch, _ = read_batch(target)
        report = analyze_batch(batch, point.resamples, point.seed, batch.aux_signs is not None)
        return report_row(report, point.labels())

    with ThreadPoolExecutor(max_workers=pool_size) as pool:
        rows = list(tqdm(pool.map(run, enumerate(points)), total=len(points), desc="sweep", unit="point"))
    target = os.path.join(out_dir, RESULTS_NAME)
    write_csv(target, rows)
    excluded = sum(1 for row in rows if row["excluded"] == "true")
    print(f"sweep: {len(rows)} rows ({excluded} excluded) -> {target}")
    return EXIT_OK


def cmd_plot(args: argparse.Namespace) -> int:
    out = args.out or "."
    os.makedirs(out, exist_ok=True)
    for path in args.inputs:
        if not os.path.isfile(path):
            raise FermistabError(f"no such results file: {path}")
        rows = read_csv(path)
        missing = {"depth", "R_obs_worst", "R_det", "encoding", "mitigation"} - set(rows[0] if rows else {})
        if rows and missing:
            raise FermistabError(f"{path}: missing columns {', '.join(sorted(missing))}")
        stem = os.path.splitext(os.path.basename(path))[0]
        target = os.path.join(out, stem + ".svg")
        curves = plot_sweep(rows, target, title=stem)
        print(f"plot: {curves} curves -> {target}")
    return EXIT_OK


COMMANDS = {
    "generate": cmd_generate,
    "sample": cmd_sample,
    "analyze": cmd_analyze,
    "sweep": cmd_sweep,
    "plot": cmd_plot,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", default=None, help="JSON sweep configuration")
    common.add_argument("--seed", type=int, default=None, help="master seed override")
    common.add_argument("--shots", type=int, default=None, help="shot count override")
    common.add_argument("--out", default=None, help="output directory override")
    common.add_argument("--explain", action="store_true", help="print the resolved experiment matrix")

    parser = argparse.ArgumentParser(prog="fermistab",
                                     description="Noisy Clifford benchmarks of fermion encodings")
    commands = parser.add_subparsers(dest="command", required=True)
    commands.add_parser("generate", parents=[common], help="write circuits and sidecars")
    for name, help_text, what in (("sample", "sample circuit files into batches", "circuit files or directories"),
                                  ("analyze", "turn batch files into a CSV", "batch files or directories"),
                                  ("plot", "render result CSVs as SVG", "result CSV files")):
        sub = commands.add_parser(name, parents=[common], help=help_text)
        sub.add_argument("inputs", nargs="+", help=what)
    commands.add_parser("sweep", parents=[common], help="generate, sample and analyze in one run")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (ConfigError, SpecError) as e:
        print(f"Error: {e}")
        return EXIT_CONFIG
    except (FermistabError, OSError) as e:
        print(f"Error: {e}")
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
