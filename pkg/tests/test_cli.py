import json
import math

from homoforge.cli import main
from homoforge.complexes import Complex, load_complex, save_complex
from homoforge.exact_linalg import SparseIntMatrix, write_matrix_file
from homoforge.homology import shadow
from homoforge.shady_partitions import PartitionLabels


def write_complex(tmp_path, Y, name="y.json"):
    path = tmp_path / name
    save_complex(Y, str(path))
    return str(path)


def matrix_file(tmp_path, dense, name="m.txt"):
    path = tmp_path / name
    write_matrix_file(SparseIntMatrix.from_dense(dense), str(path))
    return str(path)


class TestSample:
    def test_writes_json_complex(self, tmp_path):
        out = tmp_path / "y.json"
        assert main(["sample", "--n", "6", "--p", "0.5", "--seed", "1",
                     "--out", str(out)]) == 0
        Y = load_complex(str(out))
        assert Y.n == 6

    def test_fixed_size_to_stdout(self, capsys):
        assert main(["sample", "--n", "6", "--m", "4", "--seed", "1"]) == 0
        doc = json.loads(capsys.readouterr().out)
        assert len(doc["faces"]) == 4

    def test_p_and_m_exclusive(self, capsys):
        assert main(["sample", "--n", "6", "--p", "0.5", "--m", "3",
                     "--seed", "1"]) == 2

    def test_missing_n_usage_error(self, capsys):
        assert main(["sample", "--p", "0.5", "--seed", "1"]) == 2

    def test_seed_required(self):
        assert main(["sample", "--n", "6", "--p", "0.5"]) == 2

    def test_invalid_p(self, capsys):
        assert main(["sample", "--n", "6", "--p", "1.5", "--seed", "1"]) == 2


class TestHomologyCmd:
    def test_text_output(self, tmp_path, capsys, rp2):
        path = write_complex(tmp_path, rp2)
        assert main(["homology", "--in", path]) == 0
        assert capsys.readouterr().out.strip() == "betti=0 torsion=2"

    def test_json_output(self, tmp_path, capsys, torus):
        path = write_complex(tmp_path, torus)
        assert main(["homology", "--in", path, "--format", "json"]) == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc["betti"] == 2 and doc["torsion"] == []

    def test_text_format_file(self, tmp_path, capsys):
        path = tmp_path / "y.txt"
        save_complex(Complex.full(5), str(path), fmt="text")
        assert main(["homology", "--in", str(path)]) == 0
        assert "betti=0" in capsys.readouterr().out

    def test_missing_file_is_io_error(self):
        assert main(["homology", "--in", "/nonexistent/x.json"]) == 1


class TestSnfCmd:
    def test_identity(self, tmp_path, capsys):
        path = matrix_file(tmp_path, [[1, 0], [0, 1]])
        assert main(["snf", "--in", path]) == 0
        assert capsys.readouterr().out == "1\n1\n"

    def test_two_by_two(self, tmp_path, capsys):
        path = matrix_file(tmp_path, [[2, 4], [6, 8]])
        assert main(["snf", "--in", path]) == 0
        assert capsys.readouterr().out == "2\n4\n"

    def test_empty_matrix_no_output(self, tmp_path, capsys):
        path = tmp_path / "z.txt"
        path.write_text("3 3\n")
        assert main(["snf", "--in", str(path)]) == 0
        assert capsys.readouterr().out == ""

    def test_malformed_reports_line(self, tmp_path, capsys):
        path = tmp_path / "bad.txt"
        path.write_text("2 2\n0 0 one\n")
        assert main(["snf", "--in", str(path)]) == 2
        assert "line 2" in capsys.readouterr().err


class TestShadowCmd:
    def test_full_complex(self, tmp_path, capsys):
        path = write_complex(tmp_path, Complex.full(6))
        assert main(["shadow", "--in", path, "--prime", "2"]) == 0
        assert capsys.readouterr().out.strip() == "size=20 deficit=0"

    def test_empty_complex(self, tmp_path, capsys):
        path = write_complex(tmp_path, Complex(5))
        assert main(["shadow", "--in", path, "--prime", "3"]) == 0
        assert capsys.readouterr().out.strip() == "size=0 deficit=10"

    def test_boundary_sum_example(self, tmp_path, capsys):
        Y = Complex(4, 2, [(0, 1, 3), (0, 2, 3), (1, 2, 3)])
        path = write_complex(tmp_path, Y)
        assert main(["shadow", "--in", path, "--prime", "2"]) == 0
        size = int(capsys.readouterr().out.split()[0].split("=")[1])
        assert size >= 4

    def test_composite_prime_rejected(self, tmp_path, capsys):
        path = write_complex(tmp_path, Complex(5))
        assert main(["shadow", "--in", path, "--prime", "4"]) == 2

    def test_out_files(self, tmp_path, capsys):
        Y = Complex.full(5)
        path = write_complex(tmp_path, Y)
        out = tmp_path / "sh"
        assert main(["shadow", "--in", path, "--prime", "2", "--out", str(out)]) == 0
        summary = json.loads((tmp_path / "sh.json").read_text())
        assert summary == {"n": 5, "p": 2, "size": 10, "deficit": 0}
        from homoforge.homology import ShadowSet

        back = ShadowSet.load(str(tmp_path / "sh.bits"), 5, 2)
        assert back.deficit == 0


class TestVerifyPartitionCmd:
    def test_complete_passes(self, tmp_path, capsys):
        Y = Complex(6, 2, [(0, 1, 2)])
        cpath = write_complex(tmp_path, Y)
        lpath = tmp_path / "labels.bits"
        PartitionLabels(6).save(str(lpath))
        assert main(["verify-partition", "--in", cpath, "--labels", str(lpath)]) == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc["condII"] and doc["condIII"] and doc["condI_cone"]

    def test_bad_face_fails(self, tmp_path, capsys):
        Y = Complex(6, 2, [(0, 1, 2)])
        cpath = write_complex(tmp_path, Y)
        lpath = tmp_path / "labels.bits"
        PartitionLabels.from_bad_triples(6, [(0, 1, 2)]).save(str(lpath))
        assert main(["verify-partition", "--in", cpath, "--labels", str(lpath)]) == 1
        doc = json.loads(capsys.readouterr().out)
        assert doc["condII"] is False

    def test_shadow_labels_pass(self, tmp_path, capsys):
        from homoforge.complexes import sample_binomial

        Y = sample_binomial(7, 0.6, 3)
        cpath = write_complex(tmp_path, Y)
        lpath = tmp_path / "labels.bits"
        PartitionLabels.from_shadow_complement(shadow(Y, 2)).save(str(lpath))
        code = main(
            ["verify-partition", "--in", cpath, "--labels", str(lpath),
             "--max-bad", str(math.comb(7, 3))]
        )
        assert code == 0

    def test_size_mismatch(self, tmp_path, capsys):
        cpath = write_complex(tmp_path, Complex(6))
        lpath = tmp_path / "labels.bits"
        PartitionLabels(7).save(str(lpath))
        assert main(["verify-partition", "--in", cpath, "--labels", str(lpath)]) == 2


class TestCampaignCmds:
    def test_hitting_time_summary_line(self, tmp_path, capsys):
        code = main(["hitting-time", "--n", "4", "--trials", "1", "--seed", "7"])
        assert code == 0
        out = capsys.readouterr().out
        assert "equal_fraction=1.0 trials=1 n=4" in out
        assert "h_delta" in out  # csv header on stdout

    def test_missing_n(self, capsys):
        assert main(["hitting-time", "--trials", "1", "--seed", "7"]) == 2

    def test_deterministic_outputs(self, tmp_path, capsys):
        blobs = []
        for name in ("r1", "r2"):
            code = main(
                ["hitting-time", "--n", "6", "--trials", "4", "--seed", "1",
                 "--out", str(tmp_path / name)]
            )
            assert code == 0
            blobs.append((tmp_path / f"{name}.csv").read_bytes())
        assert blobs[0] == blobs[1]

    def test_json_rows_to_stdout(self, capsys):
        code = main(
            ["hitting-time", "--n", "4", "--trials", "2", "--seed", "0",
             "--format", "json"]
        )
        assert code == 0
        rows_line = capsys.readouterr().out.splitlines()[0]
        rows = json.loads(rows_line)
        assert len(rows) == 2 and rows[0]["h_z"] == 3

    def test_shadow_growth_cmd(self, capsys):
        code = main(
            ["shadow-growth", "--n", "8", "--trials", "2", "--seed", "3",
             "--prime", "2"]
        )
        assert code == 0
        assert "mean_deficit=" in capsys.readouterr().out

    def test_uncovered_rank_cmd(self, capsys):
        code = main(
            ["uncovered-rank", "--n", "10", "--trials", "2", "--seed", "5"]
        )
        assert code == 0
        assert "fraction_ok=" in capsys.readouterr().out

    def test_torsion_scan_cmd(self, tmp_path, capsys):
        code = main(
            ["torsion-scan", "--n", "7", "--trials", "1", "--seed", "2",
             "--stride", "10", "--out", str(tmp_path / "ts")]
        )
        assert code == 0
        assert "max_ln_torsion=" in capsys.readouterr().out
        assert (tmp_path / "ts_trace.csv").exists()

    def test_jobs_env_fallback(self, capsys, monkeypatch):
        monkeypatch.setenv("HOMOFORGE_JOBS", "2")
        code = main(["hitting-time", "--n", "5", "--trials", "2", "--seed", "0"])
        assert code == 0

    def test_unknown_command(self, capsys):
        assert main(["frobnicate"]) == 2
