"""
File access for meshes, landmark sequences, SRVFs, models and reports.

LOCATION: morph4d/datamanager/data_manager.py
PURPOSE: One place that knows the on-disk formats: ASCII OBJ meshes, CSV and
    JSON landmark sequences, JSON artifacts validated by morph4d.schemas and
    the .npz deformation model container
"""

import io
from pathlib import Path
from typing import List, Optional, Sequence, Tuple, Type, TypeVar, Union

import numpy as np
import orjson
from pydantic import BaseModel, ValidationError as PydanticValidationError

from morph4d.deform.mesh import Mesh, MeshTopology
from morph4d.deform.model import DeformationModel
from morph4d.deform.weights import VertexWeights
from morph4d.errors import (
    ArtifactFormatError,
    DataIOError,
    MeshFormatError,
    TopologyMismatchError,
    ValidationError,
)
from morph4d.schemas import (
    FORMAT_VERSION,
    LabeledMotionDocument,
    LabelSetDocument,
    MetricReport,
    ModelHeader,
    RecipeDocument,
    SequenceDocument,
    SpecificityTableDocument,
    SrvfDocument,
    SrvfPathDocument,
)
from morph4d.synthesis.labels import ExpressionLabel, LabelSet
from morph4d.synthesis.transitions import LabeledMotion, resolve_recipe
from morph4d.trajectory.types import LandmarkFrame, LandmarkSequence, Srvf
from morph4d.utils import get_logger

logger = get_logger(__name__)

PathLike = Union[str, Path]
DocT = TypeVar('DocT', bound=BaseModel)

JSON_OPTIONS = orjson.OPT_INDENT_2 | orjson.OPT_SERIALIZE_NUMPY
LABEL_MEAN_PREFIX = "label_mean__"
SEQUENCE_CSV_HEADER = "frame,landmark,x,y,z"


class DataManager:
    """
    Reads and writes pipeline artifacts.

    Args:
        label_set: labels used to resolve expression names in motion files
    """

    def __init__(self, label_set: Optional[LabelSet] = None):
        self.label_set = label_set or LabelSet.default()

    # JSON plumbing

    @staticmethod
    def _read_bytes(path: PathLike) -> bytes:
        try:
            return Path(path).read_bytes()
        except OSError as e:
            raise DataIOError(f"cannot read {path}: {e}") from e

    def _read_json(self, path: PathLike, doc_cls: Type[DocT]) -> DocT:
        try:
            raw = orjson.loads(self._read_bytes(path))
        except orjson.JSONDecodeError as e:
            raise ArtifactFormatError(f"{path} is not valid JSON: {e}") from e
        try:
            return doc_cls.model_validate(raw)
        except PydanticValidationError as e:
            raise ArtifactFormatError(f"{path} is not a valid {doc_cls.__name__}: {e}") from e

    @staticmethod
    def _write_bytes(path: PathLike, data: bytes) -> Path:
        path = Path(path)
        try:
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_bytes(data)
        except OSError as e:
            raise DataIOError(f"cannot write {path}: {e}") from e
        return path

    def _write_json(self, path: PathLike, doc: BaseModel) -> Path:
        return self._write_bytes(path, orjson.dumps(doc.model_dump(mode='json', exclude_none=True),
                                                    option=JSON_OPTIONS))

    # Meshes

    def load_mesh(self, path: PathLike, landmark_indices: Optional[Sequence[int]] = None) -> Mesh:
        """
        Parse an ASCII OBJ file (``v x y z`` and triangular ``f i j k`` records).

        Face entries may carry texture/normal references (``i/t/n``); only
        the vertex index is used. Other record types are ignored.

        Raises:
            MeshFormatError: malformed record or face index out of range,
                with the offending line number
        """
        text = self._read_bytes(path).decode('utf-8', errors='replace')
        vertices: List[List[float]] = []
        faces: List[List[int]] = []
        face_lines: List[int] = []
        for line_number, line in enumerate(text.splitlines(), start=1):
            tokens = line.split()
            if not tokens or tokens[0].startswith('#'):
                continue
            if tokens[0] == 'v':
                if len(tokens) < 4:
                    raise MeshFormatError("vertex record needs 3 coordinates", path, line_number)
                try:
                    vertices.append([float(t) for t in tokens[1:4]])
                except ValueError:
                    raise MeshFormatError(f"bad vertex coordinates {tokens[1:4]}", path, line_number) from None
            elif tokens[0] == 'f':
                if len(tokens) != 4:
                    raise MeshFormatError(f"only triangular faces are supported, got {len(tokens) - 1} vertices",
                                          path, line_number)
                try:
                    faces.append([int(t.split('/')[0]) - 1 for t in tokens[1:4]])
                except ValueError:
                    raise MeshFormatError(f"bad face indices {tokens[1:4]}", path, line_number) from None
                face_lines.append(line_number)

        if not vertices:
            raise MeshFormatError("no vertices", path)
        n = len(vertices)
        for i, face in enumerate(faces):
            if min(face) < 0 or max(face) >= n:
                raise MeshFormatError(
                    f"face {i} references a vertex outside 1..{n}: {[v + 1 for v in face]}", path, face_lines[i]
                )
        indices = [] if landmark_indices is None else landmark_indices
        topology = MeshTopology(n, np.array(faces, dtype=np.int64).reshape(-1, 3), indices)
        return Mesh(np.array(vertices), topology)

    def save_mesh(self, mesh: Mesh, path: PathLike) -> Path:
        lines = [f"v {x:.17g} {y:.17g} {z:.17g}" for x, y, z in mesh.vertices]
        lines += [f"f {a + 1} {b + 1} {c + 1}" for a, b, c in mesh.topology.faces]
        return self._write_bytes(path, ("\n".join(lines) + "\n").encode())

    def load_sequence_dir(self, path: PathLike, landmark_indices: Optional[Sequence[int]] = None) -> List[Mesh]:
        """
        Every ``*.obj`` in a directory, in lexicographic filename order.

        Raises:
            DataIOError: not a directory, or no OBJ files
            TopologyMismatchError: a frame's topology differs from the first frame
        """
        directory = Path(path)
        if not directory.is_dir():
            raise DataIOError(f"{directory} is not a directory")
        files = sorted(directory.glob('*.obj'))
        if not files:
            raise DataIOError(f"no .obj files in {directory}")
        meshes = [self.load_mesh(files[0], landmark_indices)]
        topology = meshes[0].topology
        for file in files[1:]:
            mesh = self.load_mesh(file, landmark_indices)
            if not topology.matches(mesh.topology):
                raise TopologyMismatchError(
                    f"frame {file.name} has {mesh.vertex_count} vertices/{len(mesh.topology.faces)} faces, "
                    f"expected {topology.vertex_count}/{len(topology.faces)}"
                )
            meshes.append(Mesh(mesh.vertices, topology))
        logger.debug("Loaded mesh sequence", path=str(directory), frames=len(meshes))
        return meshes

    def save_mesh_sequence(self, meshes: Sequence[Mesh], path: PathLike, prefix: str = "frame") -> List[Path]:
        directory = Path(path)
        return [self.save_mesh(mesh, directory / f"{prefix}_{i:04d}.obj") for i, mesh in enumerate(meshes)]

    def load_landmark_indices(self, path: PathLike) -> np.ndarray:
        """Landmark vertex indices from a JSON list or a whitespace/CSV text file."""
        path = Path(path)
        if path.suffix == '.json':
            try:
                raw = orjson.loads(self._read_bytes(path))
            except orjson.JSONDecodeError as e:
                raise ArtifactFormatError(f"{path} is not valid JSON: {e}") from e
            if isinstance(raw, dict):
                raw = raw.get('landmark_indices')
            if not isinstance(raw, list) or not all(isinstance(i, int) for i in raw):
                raise ArtifactFormatError(f"{path} must hold a list of integer landmark indices")
            return np.array(raw, dtype=np.int64)
        try:
            text = self._read_bytes(path).decode().replace(',', ' ')
            return np.array(text.split(), dtype=np.int64)
        except ValueError as e:
            raise ArtifactFormatError(f"{path} holds non-integer landmark indices") from e

    def save_landmark_indices(self, indices: Sequence[int], path: PathLike) -> Path:
        return self._write_bytes(path, orjson.dumps([int(i) for i in indices]))

    # Landmark sequences and SRVFs

    def load_sequence(self, path: PathLike, landmark_indices: Optional[Sequence[int]] = None) -> LandmarkSequence:
        """
        Landmark sequence from a .json document, a .csv file or a directory
        of OBJ frames (landmark vertices when ``landmark_indices`` is given,
        all vertices otherwise).
        """
        path = Path(path)
        if not path.exists():
            raise DataIOError(f"{path} does not exist")
        if path.is_dir():
            meshes = self.load_sequence_dir(path)
            if landmark_indices is None:
                return LandmarkSequence([m.vertices for m in meshes])
            idx = np.asarray(landmark_indices, dtype=np.int64)
            return LandmarkSequence([m.vertices[idx] for m in meshes])
        if path.suffix == '.json':
            return self._read_json(path, SequenceDocument).to_sequence()
        if path.suffix == '.csv':
            return self._read_sequence_csv(path)
        raise ArtifactFormatError(f"unsupported sequence format: {path}")

    def _read_sequence_csv(self, path: Path) -> LandmarkSequence:
        """
        Long CSV layout: header ``frame,landmark,x,y,z`` and one row per
        (frame, landmark). Rows may come in any order; frame and landmark
        indices must each form a gap-free range and every frame must list
        the same landmarks exactly once.
        """
        lines = self._read_bytes(path).decode('utf-8', errors='replace').splitlines()
        if not lines or [h.strip() for h in lines[0].split(',')] != SEQUENCE_CSV_HEADER.split(','):
            raise ArtifactFormatError(f"{path}: expected header '{SEQUENCE_CSV_HEADER}'")
        body = [line for line in lines[1:] if line.strip()]
        if not body:
            raise ArtifactFormatError(f"{path} has no landmark rows")
        try:
            rows = np.loadtxt(body, delimiter=',', ndmin=2)
        except ValueError as e:
            raise ArtifactFormatError(f"{path} is not a numeric CSV: {e}") from e
        if rows.shape[1] != 5:
            raise ArtifactFormatError(f"{path} has {rows.shape[1]} columns, expected 5")

        index = rows[:, :2]
        if not np.array_equal(index, np.round(index)):
            raise ArtifactFormatError(f"{path}: frame and landmark columns must hold integers")
        frame_ids, landmark_ids = index.astype(np.int64).T
        order = np.lexsort((landmark_ids, frame_ids))
        frame_ids, landmark_ids, coords = frame_ids[order], landmark_ids[order], rows[order, 2:]

        frames, counts = np.unique(frame_ids, return_counts=True)
        if not np.array_equal(frames, np.arange(frames[0], frames[0] + len(frames))):
            raise ArtifactFormatError(f"{path}: frame indices have gaps ({frames.tolist()})")
        if np.any(counts != counts[0]):
            raise ArtifactFormatError(
                f"{path}: landmark count changes between frames ({sorted(set(counts.tolist()))})"
            )
        k = int(counts[0])
        per_frame = landmark_ids.reshape(len(frames), k)
        expected = np.arange(per_frame[0, 0], per_frame[0, 0] + k)
        if not np.all(per_frame == expected):
            raise ArtifactFormatError(f"{path}: every frame must list landmarks {expected[0]}..{expected[-1]} once")
        return LandmarkSequence(coords.reshape(len(frames), k, 3))

    def save_sequence(self, seq: LandmarkSequence, path: PathLike) -> Path:
        path = Path(path)
        if path.suffix == '.csv':
            frame_ids, landmark_ids = np.divmod(np.arange(seq.n_frames * seq.n_landmarks), seq.n_landmarks)
            rows = np.column_stack([frame_ids, landmark_ids, seq.frames.reshape(-1, 3)])
            buffer = io.StringIO()
            np.savetxt(buffer, rows, delimiter=',', fmt=['%d', '%d', '%.17g', '%.17g', '%.17g'],
                       header=SEQUENCE_CSV_HEADER, comments='')
            return self._write_bytes(path, buffer.getvalue().encode())
        return self._write_json(path, SequenceDocument.from_sequence(seq))

    def load_srvf(self, path: PathLike) -> Srvf:
        return self._read_json(path, SrvfDocument).to_srvf()

    def save_srvf(self, q: Srvf, path: PathLike) -> Path:
        return self._write_json(path, SrvfDocument.from_srvf(q))

    def save_srvf_path(self, taus: Sequence[float], points: Sequence[Srvf], path: PathLike) -> Path:
        doc = SrvfPathDocument(taus=list(taus), points=[SrvfDocument.from_srvf(q) for q in points])
        return self._write_json(path, doc)

    def load_labeled_motion(self, path: PathLike) -> LabeledMotion:
        return self._read_json(path, LabeledMotionDocument).to_motion(self.label_set)

    def save_labeled_motion(self, motion: LabeledMotion, path: PathLike) -> Path:
        return self._write_json(path, LabeledMotionDocument.from_motion(motion))

    def load_motion_bank(self, path: PathLike) -> List[LabeledMotion]:
        """Every ``*.json`` labeled motion in a directory, in filename order."""
        directory = Path(path)
        if not directory.is_dir():
            raise DataIOError(f"{directory} is not a directory")
        return [self.load_labeled_motion(f) for f in sorted(directory.glob('*.json'))]

    def save_motion_bank(self, motions: Sequence[LabeledMotion], path: PathLike) -> List[Path]:
        """One ``NNNN_start-end.json`` file per motion, numbered in list order."""
        directory = Path(path)
        return [self.save_labeled_motion(m, directory / f"{i:04d}_{m.start.name}-{m.end.name}.json")
                for i, m in enumerate(motions)]

    def load_label_set(self, path: PathLike) -> LabelSet:
        """Labels from a JSON document (``{"labels": [...]}`` or a bare list) or one name per line."""
        path = Path(path)
        if path.suffix == '.json':
            try:
                raw = orjson.loads(self._read_bytes(path))
            except orjson.JSONDecodeError as e:
                raise ArtifactFormatError(f"{path} is not valid JSON: {e}") from e
            if isinstance(raw, list):
                raw = {'labels': raw}
            try:
                return LabelSetDocument.model_validate(raw).to_label_set()
            except PydanticValidationError as e:
                raise ArtifactFormatError(f"{path} is not a valid label set: {e}") from e
        names = [line.strip() for line in self._read_bytes(path).decode().splitlines() if line.strip()]
        return LabelSet(names)

    def load_recipe(self, path: PathLike, bank: Optional[Sequence[LabeledMotion]] = None
                    ) -> Tuple[List[LabeledMotion], Optional[LandmarkFrame]]:
        """
        Motions named by a composition recipe and its optional initial frame.

        A recipe of expression labels is resolved against ``bank``; a recipe
        of motion files loads them relative to the recipe.

        Raises:
            ValidationError: a label recipe without a bank
            MissingMotionError: a label pair with no motion in the bank
        """
        path = Path(path)
        try:
            raw = orjson.loads(self._read_bytes(path))
        except orjson.JSONDecodeError as e:
            raise ArtifactFormatError(f"{path} is not valid JSON: {e}") from e
        if isinstance(raw, list):
            raw = {'labels': raw}
        try:
            recipe = RecipeDocument.model_validate(raw)
        except PydanticValidationError as e:
            raise ArtifactFormatError(f"{path} is not a valid RecipeDocument: {e}") from e

        if recipe.labels is not None:
            if bank is None:
                raise ValidationError(f"{path} lists expression labels; a motion bank is needed to resolve them")
            motions = resolve_recipe([self.label_set[name] for name in recipe.labels], bank)
        else:
            motions = [self.load_labeled_motion(path.parent / name) for name in recipe.motions]
        init = None if recipe.init is None else np.array(recipe.init, dtype=float)
        logger.debug("Loaded recipe", path=str(path), motions=len(motions))
        return motions, init

    def load_specificity_table(self, path: PathLike
                               ) -> List[Tuple[ExpressionLabel, ExpressionLabel, List[LandmarkSequence], LandmarkSequence]]:
        """(start, end, generated, reference) entries of a specificity table manifest."""
        path = Path(path)
        table = self._read_json(path, SpecificityTableDocument)
        return [
            (self.label_set[entry.start], self.label_set[entry.end],
             [self.load_sequence(path.parent / g) for g in entry.generated],
             self.load_sequence(path.parent / entry.reference))
            for entry in table.entries
        ]

    # Deformation models

    def save_model(self, model: DeformationModel, path: PathLike) -> Path:
        """Write a model as .npz arrays plus a JSON header."""
        header = ModelHeader(
            vertex_count=model.vertex_count,
            mode_count=model.mode_count,
            n_landmarks=model.n_landmarks,
            orthonormal=model.orthonormal,
            labels=sorted(model.label_means),
        )
        arrays = {
            'header': np.frombuffer(orjson.dumps(header.model_dump(mode='json')), dtype=np.uint8),
            'basis': model.basis,
            'mean': model.mean,
            'landmark_indices': model.landmark_indices,
            'landmark_rows': model.landmark_rows,
        }
        if model.explained_variance_ratio is not None:
            arrays['explained_variance_ratio'] = model.explained_variance_ratio
        for name, value in model.label_means.items():
            arrays[LABEL_MEAN_PREFIX + name] = value
        path = Path(path)
        try:
            path.parent.mkdir(parents=True, exist_ok=True)
            with open(path, 'wb') as fh:
                np.savez(fh, **arrays)
        except OSError as e:
            raise DataIOError(f"cannot write {path}: {e}") from e
        return path

    def load_model(self, path: PathLike) -> DeformationModel:
        """
        Raises:
            ArtifactFormatError: missing arrays, bad header or header/array disagreement
        """
        try:
            with np.load(path, allow_pickle=False) as data:
                arrays = {key: data[key] for key in data.files}
        except OSError as e:
            raise DataIOError(f"cannot read {path}: {e}") from e
        except ValueError as e:
            raise ArtifactFormatError(f"{path} is not a model container: {e}") from e

        missing = {'header', 'basis', 'mean', 'landmark_indices'} - set(arrays)
        if missing:
            raise ArtifactFormatError(f"{path} is missing arrays: {sorted(missing)}")
        try:
            header = ModelHeader.model_validate(orjson.loads(arrays['header'].tobytes()))
        except (orjson.JSONDecodeError, PydanticValidationError) as e:
            raise ArtifactFormatError(f"{path} has an invalid model header: {e}") from e
        if header.format_version != FORMAT_VERSION:
            raise ArtifactFormatError(f"{path} has unsupported format version {header.format_version}")
        if arrays['basis'].shape != (3 * header.vertex_count, header.mode_count):
            raise ArtifactFormatError(f"{path}: basis shape {arrays['basis'].shape} disagrees with header")

        label_means = {name: arrays[LABEL_MEAN_PREFIX + name] for name in header.labels
                       if LABEL_MEAN_PREFIX + name in arrays}
        if len(label_means) != len(header.labels):
            raise ArtifactFormatError(f"{path} is missing expression means listed in its header")
        return DeformationModel(
            basis=arrays['basis'],
            mean=arrays['mean'],
            landmark_indices=arrays['landmark_indices'],
            landmark_rows=arrays.get('landmark_rows'),
            explained_variance_ratio=arrays.get('explained_variance_ratio'),
            label_means=label_means,
            orthonormal=header.orthonormal,
        )

    # Reports

    def save_report(self, report: MetricReport, path: PathLike) -> Path:
        return self._write_json(path, report)

    def save_per_frame_csv(self, values: Sequence[float], path: PathLike) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        rows = np.column_stack([np.arange(len(values)), np.asarray(values, dtype=float)])
        np.savetxt(path, rows, delimiter=',', fmt=['%d', '%.9g'], header='frame,error_mm', comments='')
        return path

    def save_weights_csv(self, weights: VertexWeights, path: PathLike) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        rows = np.column_stack([np.arange(len(weights)), weights.weights])
        np.savetxt(path, rows, delimiter=',', fmt=['%d', '%.17g'], header='vertex,weight', comments='')
        return path
