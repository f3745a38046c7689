"""
Tests for reading and writing pipeline artifacts

LOCATION: tests/unit/datamanager/test_data_manager.py
"""
import numpy as np
import orjson
import pytest

from morph4d.datamanager import DataManager
from morph4d.errors import (
    ArtifactFormatError,
    DataIOError,
    MeshFormatError,
    MissingMotionError,
    TopologyMismatchError,
    ValidationError,
)
from morph4d.schemas import MetricReport
from morph4d.synthesis import LabelSet, motion_from_sequence
from morph4d.trajectory import srvf_encode
from tests.helpers.synthetic import linear_onset

TRIANGLE_OBJ = "# one triangle\nv 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 3\n"


@pytest.fixture
def dm() -> DataManager:
    return DataManager()


class TestMeshFiles:
    def test_parse_triangle(self, dm, tmp_path):
        path = tmp_path / "tri.obj"
        path.write_text(TRIANGLE_OBJ)
        mesh = dm.load_mesh(path, landmark_indices=[2])
        np.testing.assert_array_equal(mesh.vertices[1], [1.0, 0.0, 0.0])
        np.testing.assert_array_equal(mesh.topology.faces, [[0, 1, 2]])
        np.testing.assert_array_equal(mesh.topology.landmark_indices, [2])

    def test_face_with_texture_refs(self, dm, tmp_path):
        path = tmp_path / "tri.obj"
        path.write_text("v 0 0 0\nv 1 0 0\nv 0 1 0\nvt 0 0\nf 1/1 2/1 3/1\n")
        np.testing.assert_array_equal(dm.load_mesh(path).topology.faces, [[0, 1, 2]])

    def test_bad_vertex_reports_line(self, dm, tmp_path):
        path = tmp_path / "bad.obj"
        path.write_text("v 0 0 0\nv 1 x 0\n")
        with pytest.raises(MeshFormatError) as exc:
            dm.load_mesh(path)
        assert exc.value.line_number == 2

    def test_face_out_of_range(self, dm, tmp_path):
        path = tmp_path / "bad.obj"
        path.write_text("v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 4\n")
        with pytest.raises(MeshFormatError, match="face 0 references a vertex outside 1..3") as exc:
            dm.load_mesh(path)
        assert exc.value.line_number == 4

    def test_quad_rejected(self, dm, tmp_path):
        path = tmp_path / "quad.obj"
        path.write_text("v 0 0 0\nv 1 0 0\nv 0 1 0\nv 1 1 0\nf 1 2 4 3\n")
        with pytest.raises(MeshFormatError, match="triangular"):
            dm.load_mesh(path)

    def test_missing_file(self, dm, tmp_path):
        with pytest.raises(DataIOError):
            dm.load_mesh(tmp_path / "absent.obj")

    def test_save_load_fixpoint(self, dm, neutral_mesh, tmp_path):
        path = dm.save_mesh(neutral_mesh, tmp_path / "mesh.obj")
        loaded = dm.load_mesh(path, neutral_mesh.topology.landmark_indices)
        np.testing.assert_array_equal(loaded.vertices, neutral_mesh.vertices)
        assert loaded.topology.matches(neutral_mesh.topology)


class TestMeshSequences:
    def test_directory_in_filename_order(self, dm, neutral_mesh, tmp_path):
        frames = [neutral_mesh.translated([0.0, 0.0, float(t)]) for t in range(3)]
        dm.save_mesh_sequence(frames, tmp_path / "seq")
        loaded = dm.load_sequence_dir(tmp_path / "seq")
        assert [m.vertices[0, 2] for m in loaded] == pytest.approx([f.vertices[0, 2] for f in frames])

    def test_topology_mismatch_names_frame(self, dm, neutral_mesh, tmp_path):
        dm.save_mesh(neutral_mesh, tmp_path / "seq" / "frame_0000.obj")
        (tmp_path / "seq" / "frame_0001.obj").write_text(TRIANGLE_OBJ)
        with pytest.raises(TopologyMismatchError, match="frame_0001.obj"):
            dm.load_sequence_dir(tmp_path / "seq")

    def test_empty_directory(self, dm, tmp_path):
        with pytest.raises(DataIOError):
            dm.load_sequence_dir(tmp_path)

    def test_landmark_sequence_from_directory(self, dm, neutral_mesh, tmp_path):
        dm.save_mesh_sequence([neutral_mesh] * 2, tmp_path / "seq")
        seq = dm.load_sequence(tmp_path / "seq", landmark_indices=[0, 24])
        assert seq.frames.shape == (2, 2, 3)


class TestSequenceFiles:
    @pytest.mark.parametrize("suffix", [".json", ".csv"])
    def test_sequence_roundtrip(self, dm, make_trajectory, tmp_path, suffix):
        seq = make_trajectory(n_frames=7, n_landmarks=4)
        loaded = dm.load_sequence(dm.save_sequence(seq, tmp_path / f"seq{suffix}"))
        np.testing.assert_array_equal(loaded.frames, seq.frames)

    def test_unsupported_suffix(self, dm, tmp_path):
        (tmp_path / "seq.txt").write_text("0 0 0\n")
        with pytest.raises(ArtifactFormatError):
            dm.load_sequence(tmp_path / "seq.txt")

    def test_missing_sequence_is_io_error(self, dm, tmp_path):
        with pytest.raises(DataIOError, match="does not exist"):
            dm.load_sequence(tmp_path / "absent.json")

    def test_json_container_carries_k(self, dm, make_trajectory, tmp_path):
        seq = make_trajectory(n_frames=3, n_landmarks=4)
        doc = orjson.loads(dm.save_sequence(seq, tmp_path / "seq.json").read_bytes())
        assert doc["k"] == 4
        assert len(doc["frames"]) == 3

    def test_json_container_with_k_loads(self, dm, tmp_path):
        frames = [[[0.0, 0.0, 0.0], [1.0, 0.0, 0.0]], [[0.0, 1.0, 0.0], [1.0, 1.0, 0.0]]]
        (tmp_path / "seq.json").write_bytes(orjson.dumps({"k": 2, "dt": 0.04, "frames": frames}))
        seq = dm.load_sequence(tmp_path / "seq.json")
        assert (seq.n_frames, seq.n_landmarks, seq.dt) == (2, 2, 0.04)
        np.testing.assert_array_equal(seq.frames, frames)

    @pytest.mark.parametrize("doc", [
        {"k": 3, "frames": [[[0, 0, 0], [1, 0, 0]]]},
        {"frames": [[[0, 0, 0], [1, 0, 0]], [[0, 0, 0]]]},
        {"frames": [[[0, 0]]]},
    ])
    def test_json_container_shape_checked(self, dm, tmp_path, doc):
        (tmp_path / "seq.json").write_bytes(orjson.dumps(doc))
        with pytest.raises(ArtifactFormatError):
            dm.load_sequence(tmp_path / "seq.json")

    def test_csv_long_layout(self, dm, make_trajectory, tmp_path):
        seq = make_trajectory(n_frames=2, n_landmarks=3)
        lines = dm.save_sequence(seq, tmp_path / "seq.csv").read_text().splitlines()
        assert lines[0] == "frame,landmark,x,y,z"
        assert len(lines) == 1 + 2 * 3
        assert [line.split(",")[:2] for line in lines[1:4]] == [["0", "0"], ["0", "1"], ["0", "2"]]
        assert lines[4].split(",")[:2] == ["1", "0"]
        assert [float(v) for v in lines[5].split(",")[2:]] == seq.frames[1, 1].tolist()

    def test_csv_rows_in_any_order(self, dm, tmp_path):
        (tmp_path / "seq.csv").write_text(
            "frame,landmark,x,y,z\n"
            "1,1,4,4,4\n0,0,1,1,1\n1,0,3,3,3\n0,1,2,2,2\n"
        )
        frames = dm.load_sequence(tmp_path / "seq.csv").frames
        np.testing.assert_array_equal(frames[:, :, 0], [[1, 2], [3, 4]])

    @pytest.mark.parametrize("body, message", [
        ("0,0,1,1,1\n2,0,1,1,1\n", "gaps"),
        ("0,0,1,1,1\n0,1,1,1,1\n1,0,1,1,1\n", "landmark count changes"),
        ("0,0,1,1,1\n0,0,1,1,1\n", "once"),
        ("0,0.5,1,1,1\n", "integers"),
        ("0,0,1,1\n", "columns|numeric"),
        ("", "no landmark rows"),
    ])
    def test_csv_layout_errors(self, dm, tmp_path, body, message):
        (tmp_path / "seq.csv").write_text("frame,landmark,x,y,z\n" + body)
        with pytest.raises(ArtifactFormatError, match=message):
            dm.load_sequence(tmp_path / "seq.csv")

    def test_csv_without_header_rejected(self, dm, tmp_path):
        (tmp_path / "seq.csv").write_text("0,0,1,1,1\n")
        with pytest.raises(ArtifactFormatError, match="header"):
            dm.load_sequence(tmp_path / "seq.csv")

    def test_srvf_keeps_scale(self, dm, make_trajectory, tmp_path):
        q = srvf_encode(make_trajectory())
        loaded = dm.load_srvf(dm.save_srvf(q, tmp_path / "q.json"))
        assert loaded.scale == q.scale and loaded.dt == q.dt
        np.testing.assert_array_equal(loaded.samples, q.samples)

    def test_malformed_json(self, dm, tmp_path):
        path = tmp_path / "q.json"
        path.write_text("{not json")
        with pytest.raises(ArtifactFormatError):
            dm.load_srvf(path)

    def test_unknown_field_rejected(self, dm, tmp_path):
        path = tmp_path / "q.json"
        path.write_bytes(orjson.dumps({"samples": [[1, 0, 0]], "dt": 1.0, "extra": 1}))
        with pytest.raises(ArtifactFormatError):
            dm.load_srvf(path)


class TestLabeledArtifacts:
    def test_labeled_motion_roundtrip(self, dm, make_onset, tmp_path):
        motion, _ = make_onset("eyebrow")
        loaded = dm.load_labeled_motion(dm.save_labeled_motion(motion, tmp_path / "m.json"))
        assert (loaded.start.name, loaded.end.name) == ("neutral", "eyebrow")
        np.testing.assert_array_equal(loaded.init, motion.init)

    def test_label_set_formats(self, dm, tmp_path):
        (tmp_path / "labels.json").write_bytes(orjson.dumps(["neutral", "smile"]))
        (tmp_path / "labels.txt").write_text("neutral\nsmile\n")
        for name in ("labels.json", "labels.txt"):
            assert [lab.name for lab in dm.load_label_set(tmp_path / name)] == ["neutral", "smile"]

    def test_recipe_paths_relative_to_recipe(self, make_onset, tmp_path):
        dm = DataManager(LabelSet.default())
        motion, _ = make_onset("eyebrow")
        dm.save_labeled_motion(motion, tmp_path / "motions" / "a.json")
        (tmp_path / "recipe.json").write_bytes(orjson.dumps({"motions": ["motions/a.json"]}))
        motions, init = dm.load_recipe(tmp_path / "recipe.json")
        assert len(motions) == 1 and init is None

    def test_label_recipe_resolved_against_bank(self, dm, make_onset, labels, tmp_path):
        onset, peak = make_onset("bareteeth")
        back = motion_from_sequence(linear_onset(peak, onset.init, 10), labels["bareteeth"], labels.neutral)
        dm.save_motion_bank([back, onset], tmp_path / "bank")
        bank = dm.load_motion_bank(tmp_path / "bank")
        (tmp_path / "recipe.json").write_bytes(orjson.dumps(["neutral", "bareteeth", "neutral"]))
        motions, init = dm.load_recipe(tmp_path / "recipe.json", bank)
        assert [(m.start.name, m.end.name) for m in motions] == [("neutral", "bareteeth"), ("bareteeth", "neutral")]
        assert init is None

    def test_label_recipe_needs_bank(self, dm, tmp_path):
        (tmp_path / "recipe.json").write_bytes(orjson.dumps(["neutral", "bareteeth"]))
        with pytest.raises(ValidationError, match="motion bank"):
            dm.load_recipe(tmp_path / "recipe.json")

    def test_label_recipe_missing_pair(self, dm, make_onset, tmp_path):
        onset, _ = make_onset("bareteeth")
        (tmp_path / "recipe.json").write_bytes(orjson.dumps(["neutral", "eyebrow"]))
        with pytest.raises(MissingMotionError):
            dm.load_recipe(tmp_path / "recipe.json", [onset])

    @pytest.mark.parametrize("doc", [["neutral"], {"labels": ["neutral", "eyebrow"], "motions": ["a.json"]}, {}])
    def test_invalid_recipe(self, dm, tmp_path, doc):
        (tmp_path / "recipe.json").write_bytes(orjson.dumps(doc))
        with pytest.raises(ArtifactFormatError):
            dm.load_recipe(tmp_path / "recipe.json", [])

    def test_bank_files_named_by_labels(self, dm, make_onset, tmp_path):
        onset, _ = make_onset("eyebrow")
        [path] = dm.save_motion_bank([onset], tmp_path / "bank")
        assert path.name == "0000_neutral-eyebrow.json"

    def test_specificity_table_manifest(self, dm, make_trajectory, tmp_path):
        ref, gen = make_trajectory(n_frames=4), make_trajectory(n_frames=4)
        dm.save_sequence(ref, tmp_path / "seqs" / "ref.json")
        dm.save_sequence(gen, tmp_path / "seqs" / "gen.csv")
        manifest = {"entries": [{"start": "bareteeth", "end": "eyebrow", "reference": "seqs/ref.json",
                                 "generated": ["seqs/gen.csv"]}]}
        (tmp_path / "table.json").write_bytes(orjson.dumps(manifest))
        [(start, end, generated, reference)] = dm.load_specificity_table(tmp_path / "table.json")
        assert (start.name, end.name) == ("bareteeth", "eyebrow")
        np.testing.assert_array_equal(generated[0].frames, gen.frames)
        np.testing.assert_array_equal(reference.frames, ref.frames)

    def test_landmark_indices_formats(self, dm, tmp_path):
        dm.save_landmark_indices([3, 1, 2], tmp_path / "lms.json")
        (tmp_path / "lms.txt").write_text("3, 1\n2\n")
        for name in ("lms.json", "lms.txt"):
            np.testing.assert_array_equal(dm.load_landmark_indices(tmp_path / name), [3, 1, 2])


class TestModelContainer:
    def test_roundtrip(self, dm, planted_model, tmp_path):
        loaded = dm.load_model(dm.save_model(planted_model, tmp_path / "model.npz"))
        np.testing.assert_array_equal(loaded.basis, planted_model.basis)
        np.testing.assert_array_equal(loaded.mean, planted_model.mean)
        np.testing.assert_array_equal(loaded.landmark_indices, planted_model.landmark_indices)
        np.testing.assert_array_equal(loaded.landmark_rows, planted_model.landmark_rows)

    def test_not_a_container(self, dm, tmp_path):
        path = tmp_path / "model.npz"
        path.write_text("plain text")
        with pytest.raises(ArtifactFormatError):
            dm.load_model(path)


class TestReports:
    def test_report_json(self, dm, tmp_path):
        path = dm.save_report(MetricReport(metric="per-vertex", mean_mm=1.5, std_mm=0.25), tmp_path / "r.json")
        assert orjson.loads(path.read_bytes())["mean_mm"] == 1.5

    def test_per_frame_csv(self, dm, tmp_path):
        path = dm.save_per_frame_csv([0.5, 1.0], tmp_path / "frames.csv")
        assert path.read_text().splitlines()[0] == "frame,error_mm"
