import struct
import subprocess
import sys

import numpy as np
import pytest

from embexport import ExportJob, export_embeddings
from embexport.cli import main
from embexport.encoders import EncoderError, resolve_encoder


def parse_emb1(path):
    """Independent reader used only by these tests."""
    raw = path.read_bytes()
    assert raw[:4] == b"EMB1"
    rows, dim = struct.unpack("<II", raw[4:12])
    data = np.frombuffer(raw, dtype="<f4", offset=12).reshape(rows, dim)
    return rows, dim, data


@pytest.fixture
def names_file(tmp_path):
    p = tmp_path / "names.txt"
    p.write_text("alpha\nbeta\nalpha\n", encoding="utf-8")
    return p


class TestHashEncoder:
    def test_deterministic(self):
        enc, dim = resolve_encoder("hash:64")
        assert dim == 64
        a = enc(["hello"])
        b = enc(["hello"])
        assert np.array_equal(a, b)

    def test_bad_spec(self):
        with pytest.raises(EncoderError):
            resolve_encoder("hash:four")
        with pytest.raises(EncoderError):
            resolve_encoder("hash:2")

    def test_unknown_model_without_cache_errors(self):
        enc_id = "definitely/not-a-model-anywhere"
        with pytest.raises(EncoderError):
            enc, _ = resolve_encoder(enc_id)


class TestExport:
    def test_header_row_count(self, names_file, tmp_path):
        job = ExportJob(str(names_file), "hash:32", str(tmp_path / "e.bin"),
                        str(tmp_path / "e.idx"))
        rows, dim = export_embeddings(job)
        assert (rows, dim) == (3, 32)
        file_rows, file_dim, _ = parse_emb1(tmp_path / "e.bin")
        assert (file_rows, file_dim) == (3, 32)
        assert (tmp_path / "e.idx").read_text().splitlines() == ["alpha", "beta", "alpha"]

    def test_duplicate_lines_identical_rows(self, names_file, tmp_path):
        job = ExportJob(str(names_file), "hash:32", str(tmp_path / "e.bin"),
                        str(tmp_path / "e.idx"))
        export_embeddings(job)
        _, _, data = parse_emb1(tmp_path / "e.bin")
        assert np.array_equal(data[0], data[2])
        cos = float(data[0] @ data[2] / (np.linalg.norm(data[0]) * np.linalg.norm(data[2])))
        assert cos == pytest.approx(1.0)

    def test_batch_size_does_not_change_output(self, tmp_path):
        p = tmp_path / "many.txt"
        p.write_text("".join(f"token-{i}\n" for i in range(23)), encoding="utf-8")
        outs = []
        for bs in (4, 64):
            out = tmp_path / f"e{bs}.bin"
            export_embeddings(ExportJob(str(p), "hash:48", str(out),
                                        str(tmp_path / f"e{bs}.idx"), batch_size=bs))
            outs.append(out.read_bytes())
        assert outs[0] == outs[1]

    def test_separate_ids_file(self, names_file, tmp_path):
        ids = tmp_path / "ids.txt"
        ids.write_text("e1\ne2\ne3\n", encoding="utf-8")
        job = ExportJob(str(names_file), "hash:32", str(tmp_path / "e.bin"),
                        str(tmp_path / "e.idx"), ids_path=str(ids))
        export_embeddings(job)
        assert (tmp_path / "e.idx").read_text().splitlines() == ["e1", "e2", "e3"]

    def test_ids_count_mismatch(self, names_file, tmp_path):
        ids = tmp_path / "ids.txt"
        ids.write_text("only-one\n", encoding="utf-8")
        job = ExportJob(str(names_file), "hash:32", str(tmp_path / "e.bin"),
                        str(tmp_path / "e.idx"), ids_path=str(ids))
        with pytest.raises(ValueError, match="identifiers"):
            export_embeddings(job)

    def test_empty_input_rejected(self, tmp_path):
        p = tmp_path / "empty.txt"
        p.write_text("", encoding="utf-8")
        job = ExportJob(str(p), "hash:32", str(tmp_path / "e.bin"), str(tmp_path / "e.idx"))
        with pytest.raises(ValueError, match="no input"):
            export_embeddings(job)


class TestCli:
    def test_export_roundtrip(self, names_file, tmp_path, capsys):
        code = main(["export", "--input", str(names_file), "--model", "hash:32",
                     "--out", str(tmp_path / "e.bin"), "--index", str(tmp_path / "e.idx")])
        assert code == 0
        assert "3 x 32" in capsys.readouterr().out

    def test_missing_flag_usage_error(self, capsys):
        assert main(["export", "--model", "hash:32"]) == 1

    def test_missing_input_runtime_error(self, tmp_path, capsys):
        code = main(["export", "--input", str(tmp_path / "none.txt"),
                     "--model", "hash:32", "--out", str(tmp_path / "e.bin"),
                     "--index", str(tmp_path / "e.idx")])
        assert code == 2

    def test_module_entry(self, names_file, tmp_path):
        proc = subprocess.run(
            [sys.executable, "-m", "embexport", "export",
             "--input", str(names_file), "--model", "hash:16",
             "--out", str(tmp_path / "e.bin"), "--index", str(tmp_path / "e.idx")],
            capture_output=True, text=True)
        assert proc.returncode == 0
