"""
Command-line interface.

LOCATION: morph4d/main.py
PURPOSE: Thin click commands composing the library operations; every
    numeric step lives in the library modules

Exit codes: 0 success, 1 invalid input or usage, 2 file errors.
"""

import logging
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional, Sequence, Tuple

import click
import numpy as np
import orjson

from morph4d.config import PipelineConfig, load_config
from morph4d.datamanager import DataManager
from morph4d.deform import (
    DisplacementField,
    Mesh,
    build_displacement_dataset,
    compute_vertex_weights,
    deform_sequence,
    train_pca,
)
from morph4d.errors import DataIOError, ValidationError
from morph4d.evaluation import (
    cumulative_error_curve,
    displacement_l1,
    per_frame_specificity,
    per_vertex_error,
    sliding_window_error,
    specificity,
    specificity_nearest,
    specificity_table,
    weighted_l1,
)
from morph4d.schemas import MetricReport, PairSummary
from morph4d.synthesis import (
    compose_transitions,
    motion_from_sequence,
    onset_prototypes,
    select_by_prototype,
    synth_peak_transition,
    synthesize_transition_bank,
    transfer_motion,
)
from morph4d.trajectory import SphereConfig, geodesic_interpolate, srvf_decode, srvf_encode
from morph4d.trajectory.types import LandmarkFrame
from morph4d.utils import configure_logging, get_logger, observe

logger = get_logger(__name__)

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_IO = 2


@dataclass
class CliState:
    config: PipelineConfig
    data: DataManager
    out: Optional[Path]

    def landmark_indices(self, override: Optional[str]) -> Optional[np.ndarray]:
        path = override or self.config.landmark_index_path
        return None if path is None else self.data.load_landmark_indices(path)

    def out_path(self, override: Optional[str]) -> Path:
        out = Path(override) if override else self.out
        if out is None:
            raise ValidationError("an output path is required (--out)")
        return out


out_option = click.option('--out', 'out', type=click.Path(), default=None,
                          help='Output path (overrides the global --out)')
landmarks_option = click.option('--landmarks', type=click.Path(dir_okay=False), default=None,
                                help='Landmark vertex index file (defaults to the config entry)')


def _load_frame(state: CliState, path: str, landmarks: Optional[np.ndarray]) -> LandmarkFrame:
    """Initial landmark configuration from an OBJ mesh or the first frame of a sequence."""
    if Path(path).suffix == '.obj':
        mesh = state.data.load_mesh(path)
        return mesh.vertices if landmarks is None else mesh.vertices[landmarks]
    return state.data.load_sequence(path, landmarks)[0]


@click.group()
@click.option('--config', 'config_path', type=click.Path(dir_okay=False), default=None,
              help='JSON config file (falls back to $MORPH4D_CONFIG)')
@click.option('--out', 'out', type=click.Path(), default=None, help='Default output path')
@click.option('--verbose', '-v', is_flag=True, help='Debug logging')
@click.pass_context
def cli(ctx: click.Context, config_path: Optional[str], out: Optional[str], verbose: bool):
    """SRVF-based 4D facial expression toolkit."""
    config = load_config(config_path)
    configure_logging(logging.DEBUG if verbose else getattr(logging, config.log_level))
    label_set = None
    if config.label_set_path is not None:
        label_set = DataManager().load_label_set(config.label_set_path)
    ctx.obj = CliState(config, DataManager(label_set), Path(out) if out else None)


@cli.command()
@click.option('--in', 'source', required=True, type=click.Path(), help='Sequence (.json, .csv or OBJ dir)')
@landmarks_option
@out_option
@click.pass_obj
@observe("cli.encode")
def encode(state: CliState, source: str, landmarks: Optional[str], out: Optional[str]):
    """Encode a landmark sequence as an SRVF."""
    seq = state.data.load_sequence(source, state.landmark_indices(landmarks))
    path = state.data.save_srvf(srvf_encode(seq), state.out_path(out))
    click.echo(str(path))


@cli.command()
@click.option('--srvf', 'srvf_path', required=True, type=click.Path(dir_okay=False))
@click.option('--init', 'init_path', required=True, type=click.Path(),
              help='Initial frame: OBJ mesh or a sequence whose first frame is used')
@click.option('--restore-scale/--unit-scale', default=True, help='Decode at the encoded magnitude')
@landmarks_option
@out_option
@click.pass_obj
@observe("cli.decode")
def decode(state: CliState, srvf_path: str, init_path: str, restore_scale: bool,
           landmarks: Optional[str], out: Optional[str]):
    """Reconstruct a landmark sequence from an SRVF and an initial frame."""
    q = state.data.load_srvf(srvf_path)
    init = _load_frame(state, init_path, state.landmark_indices(landmarks))
    seq = srvf_decode(q, init, restore_scale=restore_scale)
    click.echo(str(state.data.save_sequence(seq, state.out_path(out))))


@cli.command()
@click.option('--q1', required=True, type=click.Path(dir_okay=False))
@click.option('--q2', required=True, type=click.Path(dir_okay=False))
@click.option('--tau', type=float, default=None, help='Single interpolation parameter in [0, 1]')
@click.option('--n-steps', type=int, default=None, help='Evenly spaced parameters (defaults to config n_steps)')
@out_option
@click.pass_obj
@observe("cli.interpolate")
def interpolate(state: CliState, q1: str, q2: str, tau: Optional[float], n_steps: Optional[int],
                out: Optional[str]):
    """Sample the geodesic between two SRVFs."""
    a, b = state.data.load_srvf(q1), state.data.load_srvf(q2)
    if tau is not None:
        taus = [tau]
    else:
        n = n_steps if n_steps is not None else state.config.n_steps
        if n < 2:
            raise ValidationError(f"n_steps must be at least 2, got {n}")
        taus = np.linspace(0.0, 1.0, n).tolist()
    points = [geodesic_interpolate(a, b, t, state.config.numeric_epsilon) for t in taus]
    click.echo(str(state.data.save_srvf_path(taus, points, state.out_path(out))))


@cli.command('synth-transition')
@click.option('--m1', required=True, type=click.Path(dir_okay=False), help='Onset motion to the start peak')
@click.option('--m2', required=True, type=click.Path(dir_okay=False), help='Onset motion to the end peak')
@click.option('--n-steps', type=int, default=None)
@out_option
@click.pass_obj
@observe("cli.synth_transition")
def synth_transition(state: CliState, m1: str, m2: str, n_steps: Optional[int], out: Optional[str]):
    """Peak-to-peak transition between two onset motions."""
    transition = synth_peak_transition(state.data.load_labeled_motion(m1), state.data.load_labeled_motion(m2),
                                       n_steps if n_steps is not None else state.config.n_steps)
    logger.info("Synthesized transition", start=transition.start.name, end=transition.end.name)
    click.echo(str(state.data.save_sequence(transition.sequence, state.out_path(out))))


@cli.command('synth-bank')
@click.option('--onsets', required=True, type=click.Path(file_okay=False),
              help='Directory of onset motions sharing one neutral frame')
@click.option('--n-steps', type=int, default=None)
@click.option('--top-k', type=int, default=None, help='Transitions kept per label pair (defaults to config top_k)')
@out_option
@click.pass_obj
@observe("cli.synth_bank")
def synth_bank(state: CliState, onsets: str, n_steps: Optional[int], top_k: Optional[int], out: Optional[str]):
    """Synthesize peak-peak transitions for every onset pair and keep those nearest the prototypes."""
    motions = state.data.load_motion_bank(onsets)
    bank = synthesize_transition_bank(motions, n_steps if n_steps is not None else state.config.n_steps)
    kept = select_by_prototype(bank, onset_prototypes(motions), top_k if top_k is not None else state.config.top_k)
    logger.info("Selected transitions", synthesized=len(bank), kept=len(kept))
    out_dir = state.out_path(out)
    state.data.save_motion_bank([motion_from_sequence(t.sequence, t.start, t.end) for t in kept], out_dir)
    click.echo(str(out_dir))


@cli.command()
@click.option('--recipe', required=True, type=click.Path(dir_okay=False))
@click.option('--bank', 'bank_dir', type=click.Path(file_okay=False), default=None,
              help='Labeled-motion directory resolving a recipe of expression labels')
@out_option
@click.pass_obj
@observe("cli.compose")
def compose(state: CliState, recipe: str, bank_dir: Optional[str], out: Optional[str]):
    """Chain the motions of a recipe into one long sequence."""
    bank = state.data.load_motion_bank(bank_dir) if bank_dir else None
    motions, init = state.data.load_recipe(recipe, bank)
    seq = compose_transitions(motions, motions[0].init if init is None else init)
    click.echo(str(state.data.save_sequence(seq, state.out_path(out))))


@cli.command('mean-srvf')
@click.option('--srvf', 'srvf_paths', required=True, multiple=True, type=click.Path(dir_okay=False),
              help='SRVF to average (repeatable)')
@out_option
@click.pass_obj
@observe("cli.mean_srvf")
def mean_srvf(state: CliState, srvf_paths: Sequence[str], out: Optional[str]):
    """Karcher mean of SRVFs, the reference point for tangent-space work."""
    config = state.config
    sphere = SphereConfig.from_motions([state.data.load_srvf(p) for p in srvf_paths], tol=config.karcher_tol,
                                       max_iter=config.karcher_max_iter, numeric_epsilon=config.numeric_epsilon)
    click.echo(str(state.data.save_srvf(sphere.reference_point, state.out_path(out))))


@cli.command()
@click.option('--source', required=True, type=click.Path(), help='Source landmark sequence')
@click.option('--target', required=True, type=click.Path(),
              help='Target neutral: OBJ mesh or a sequence whose first frame is used')
@landmarks_option
@out_option
@click.pass_obj
@observe("cli.transfer")
def transfer(state: CliState, source: str, target: str, landmarks: Optional[str], out: Optional[str]):
    """Replay a source motion from another face's neutral landmarks."""
    indices = state.landmark_indices(landmarks)
    seq = transfer_motion(state.data.load_sequence(source, indices), _load_frame(state, target, indices))
    click.echo(str(state.data.save_sequence(seq, state.out_path(out))))


@cli.command('train-model')
@click.option('--pair', 'pairs', required=True, multiple=True, nargs=2, type=click.Path(dir_okay=False),
              help='NEUTRAL EXPRESSIVE mesh pair (repeatable)')
@click.option('--label', 'labels', multiple=True, help='Expression of each pair, in order (repeatable)')
@click.option('--modes', type=int, default=None, help='Number of modes (defaults to config pca_modes)')
@click.option('--variance-target', type=float, default=None)
@click.option('--expression-mean/--global-mean', default=None, help='Per-expression mean displacements')
@landmarks_option
@out_option
@click.pass_obj
@observe("cli.train_model")
def train_model(state: CliState, pairs: Sequence[Sequence[str]], labels: Sequence[str], modes: Optional[int],
                variance_target: Optional[float], expression_mean: Optional[bool], landmarks: Optional[str],
                out: Optional[str]):
    """Train a PCA deformation model on neutral/expressive mesh pairs."""
    indices = state.landmark_indices(landmarks)
    if indices is None:
        raise ValidationError("train-model needs landmark indices (--landmarks or config landmark_index_path)")
    meshes = [(state.data.load_mesh(n, indices), state.data.load_mesh(e, indices)) for n, e in pairs]
    dense = [d for d, _ in build_displacement_dataset(meshes)]
    m = modes if modes is not None else state.config.pca_modes
    target = variance_target if variance_target is not None else state.config.variance_target
    specific = state.config.expression_specific_mean if expression_mean is None else expression_mean
    model = train_pca(dense, indices, m=m, variance_target=None if m is not None else target,
                      labels=list(labels) or None, expression_specific_mean=specific)
    click.echo(str(state.data.save_model(model, state.out_path(out))))


@cli.command()
@click.option('--model', 'model_path', required=True, type=click.Path(dir_okay=False))
@click.option('--neutral', required=True, type=click.Path(dir_okay=False), help='Neutral OBJ mesh')
@click.option('--lms', required=True, type=click.Path(), help='Landmark sequence driving the mesh')
@click.option('--ridge', type=float, default=None, help='Ridge weight (defaults to config, then the default rule)')
@click.option('--label', default=None, help='Expression mean to fit with')
@out_option
@click.pass_obj
@observe("cli.fit")
def fit(state: CliState, model_path: str, neutral: str, lms: str, ridge: Optional[float], label: Optional[str],
        out: Optional[str]):
    """Animate a neutral mesh from landmarks; writes one OBJ per frame."""
    model = state.data.load_model(model_path)
    mesh = state.data.load_mesh(neutral, model.landmark_indices)
    seq = state.data.load_sequence(lms, model.landmark_indices)
    ridge = ridge if ridge is not None else state.config.ridge
    meshes = deform_sequence(mesh, seq, model, ridge=ridge, label=label)
    out_path = state.out_path(out)
    if out_path.suffix == '.obj':
        if len(meshes) != 1:
            raise ValidationError(f"{len(meshes)} frames cannot be written to a single OBJ; pass a directory")
        click.echo(str(state.data.save_mesh(meshes[0], out_path)))
    else:
        state.data.save_mesh_sequence(meshes, out_path)
        click.echo(str(out_path))


def _load_meshes(state: CliState, path: str) -> List:
    return state.data.load_sequence_dir(path) if Path(path).is_dir() else [state.data.load_mesh(path)]


def _load_mesh_pairs(state: CliState, metric: str, a: Optional[str], b: Optional[str]) -> Tuple[List, List]:
    if not (a and b):
        raise ValidationError(f"{metric} needs --a and --b")
    gen, gt = _load_meshes(state, a), _load_meshes(state, b)
    if metric != 'sliding-window' and len(gen) != len(gt):
        raise ValidationError(f"--a has {len(gen)} meshes, --b has {len(gt)}")
    return gen, gt


def _s2d_report(state: CliState, gen: List, gt: List, neutral: Mesh) -> MetricReport:
    """Sparse-to-dense loss of every generated/ground-truth mesh pair against one neutral mesh."""
    w = compute_vertex_weights(neutral)
    weights = state.config.s2d_weights
    l_dr = np.array([displacement_l1(DisplacementField(x.vertices - neutral.vertices),
                                     DisplacementField(y.vertices - neutral.vertices))
                     for x, y in zip(gen, gt)])
    l_pr = np.array([weighted_l1(x, y, w) for x, y in zip(gen, gt)])
    totals = np.array([weights.total(d, p) for d, p in zip(l_dr, l_pr)])
    return MetricReport(metric='s2d-loss', mean_mm=float(totals.mean()), std_mm=float(totals.std()),
                        details={'meshes': len(gen), 'l_dr': float(l_dr.mean()), 'l_pr': float(l_pr.mean()),
                                 'beta1': weights.beta1, 'beta2': weights.beta2})


def _specificity_table_report(state: CliState, table_path: str) -> MetricReport:
    table = specificity_table(state.data.load_specificity_table(table_path))
    pairs = [PairSummary(start=start, end=end, mean_mm=s.mean, std_mm=s.std) for (start, end), s in table.items()]
    means = np.array([p.mean_mm for p in pairs])
    return MetricReport(metric='specificity-table', mean_mm=float(means.mean()), std_mm=float(means.std()),
                        pairs=pairs, details={'pairs': len(pairs)})


@cli.command()
@click.argument('metric', type=click.Choice(['per-vertex', 'sliding-window', 'specificity', 'specificity-table',
                                             's2d-loss']))
@click.option('--a', 'a', type=click.Path(), help='Generated mesh or OBJ directory')
@click.option('--b', 'b', type=click.Path(), help='Ground-truth mesh or OBJ directory')
@click.option('--window', type=int, default=None, help='Sliding window length (defaults to config)')
@click.option('--threshold', 'thresholds', type=float, multiple=True, help='Cumulative curve threshold (repeatable)')
@click.option('--generated', multiple=True, type=click.Path(), help='Generated sequence (repeatable)')
@click.option('--reference', 'references', multiple=True, type=click.Path(),
              help='Reference sequence (repeatable; several imply nearest-reference scoring)')
@click.option('--csv', 'csv_path', type=click.Path(), default=None, help='Per-frame specificity CSV')
@click.option('--table', 'table_path', type=click.Path(dir_okay=False), default=None,
              help='Specificity table manifest: label pairs with reference and generated sequences')
@click.option('--neutral', type=click.Path(dir_okay=False), default=None, help='Neutral OBJ mesh for s2d-loss')
@landmarks_option
@out_option
@click.pass_obj
@observe("cli.evaluate")
def evaluate(state: CliState, metric: str, a: Optional[str], b: Optional[str], window: Optional[int],
             thresholds: Sequence[float], generated: Sequence[str], references: Sequence[str],
             csv_path: Optional[str], table_path: Optional[str], neutral: Optional[str],
             landmarks: Optional[str], out: Optional[str]):
    """Compute an evaluation metric and write a JSON report."""
    if metric == 'per-vertex':
        gen, gt = _load_mesh_pairs(state, metric, a, b)
        per_mesh = [per_vertex_error(x, y) for x, y in zip(gen, gt)]
        pooled = np.concatenate([s.values for s in per_mesh])
        report = MetricReport(metric=metric, mean_mm=float(pooled.mean()), std_mm=float(pooled.std()),
                              details={'meshes': len(per_mesh), 'vertices': gen[0].vertex_count})
        if thresholds:
            curve = cumulative_error_curve(per_mesh, thresholds)
            report.curve = curve.fractions.tolist()
            report.details['thresholds'] = curve.thresholds.tolist()
    elif metric == 'sliding-window':
        gen, gt = _load_mesh_pairs(state, metric, a, b)
        w = window if window is not None else state.config.sliding_window
        summary = sliding_window_error(gen, gt, w)
        report = MetricReport(metric=metric, mean_mm=summary.mean, std_mm=summary.std,
                              curve=summary.values.tolist(), details={'window': w})
    elif metric == 's2d-loss':
        indices = state.landmark_indices(landmarks)
        if neutral is None or indices is None:
            raise ValidationError("s2d-loss needs --neutral and landmark indices (--landmarks or config)")
        gen, gt = _load_mesh_pairs(state, metric, a, b)
        report = _s2d_report(state, gen, gt, state.data.load_mesh(neutral, indices))
    elif metric == 'specificity-table':
        if table_path is None:
            raise ValidationError("specificity-table needs --table")
        report = _specificity_table_report(state, table_path)
    else:
        if not (generated and references):
            raise ValidationError("specificity needs --generated and --reference")
        samples = [state.data.load_sequence(p) for p in generated]
        refs = [state.data.load_sequence(p) for p in references]
        summary = specificity(samples, refs[0]) if len(refs) == 1 else specificity_nearest(samples, refs)
        curve = per_frame_specificity(samples, refs[0]) if len(refs) == 1 else None
        report = MetricReport(metric=metric, mean_mm=summary.mean, std_mm=summary.std, curve=curve,
                              details={'samples': len(samples), 'references': len(refs)})
        if csv_path and curve is not None:
            state.data.save_per_frame_csv(curve, csv_path)

    target = Path(out) if out else state.out
    if target is None:
        click.echo(orjson.dumps(report.model_dump(mode='json', exclude_none=True)).decode())
    else:
        click.echo(str(state.data.save_report(report, target)))


@cli.command()
@click.option('--mesh', required=True, type=click.Path(dir_okay=False), help='Neutral OBJ mesh')
@landmarks_option
@out_option
@click.pass_obj
@observe("cli.weights")
def weights(state: CliState, mesh: str, landmarks: Optional[str], out: Optional[str]):
    """Write landmark-distance vertex weights as CSV."""
    indices = state.landmark_indices(landmarks)
    if indices is None:
        raise ValidationError("weights needs landmark indices (--landmarks or config landmark_index_path)")
    neutral = state.data.load_mesh(mesh, indices)
    click.echo(str(state.data.save_weights_csv(compute_vertex_weights(neutral), state.out_path(out))))


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Run the CLI and map failures to exit codes."""
    try:
        cli.main(args=list(argv) if argv is not None else None, prog_name='morph4d', standalone_mode=False)
    except click.exceptions.Abort:
        click.echo("Aborted!", err=True)
        return EXIT_VALIDATION
    except click.ClickException as e:
        e.show()
        return EXIT_VALIDATION
    except ValidationError as e:
        logger.error("Invalid input", error=str(e), type=type(e).__name__)
        click.echo(f"error: {e}", err=True)
        return EXIT_VALIDATION
    except (DataIOError, OSError) as e:
        logger.error("I/O failure", error=str(e), type=type(e).__name__)
        click.echo(f"error: {e}", err=True)
        return EXIT_IO
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
