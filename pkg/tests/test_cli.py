import subprocess
import sys

import pytest
from helpers import EXAMPLES, LIBRARY, load, term

from lpkuroda.cli import (
    EXIT_CHECK,
    EXIT_OK,
    EXIT_RECHECK,
    EXIT_VALIDATION,
    Report,
    RunConfig,
    is_higher_order,
    is_inference_rule,
    main,
    recheck,
)

LEIBNIZ = EXAMPLES / "leibniz.dk"


def run(argv, capsys):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def write(tmp_path):
    def _write(text, name="input.dk"):
        p = tmp_path / name
        p.write_text(text)
        return p

    return _write


class TestCheck:
    def test_library_checks(self, capsys):
        code, out, err = run(["check", *LIBRARY], capsys)
        assert code == EXIT_OK, err
        assert out.startswith("ok: ")

    def test_typing_error(self, capsys, write):
        code, _, err = run(["check", write("thm bad : Prf bot := top_i.")], capsys)
        assert code == EXIT_CHECK
        assert "bad" in err

    def test_parse_error_has_position(self, capsys, write):
        code, _, err = run(["check", write("c : Set\nd : Set.")], capsys)
        assert code == EXIT_CHECK
        assert "<parse>" in err and "2:1" in err

    def test_not_hol_encoded(self, capsys, write):
        code, _, err = run(["check", write("f : Prop -> Set.")], capsys)
        assert code == EXIT_VALIDATION
        assert "[kappa] f" in err

    def test_check_error_outranks_validation(self, capsys, write):
        code, _, _ = run(["check", write("f : Prop -> Set."), write("c : Set", "b.dk")], capsys)
        assert code == EXIT_CHECK

    def test_intuitionistic_base_rejects_pem(self, capsys):
        classical = next(p for p in LIBRARY if p.name == "classical.dk")
        code, _, err = run(["check", "--intuitionistic-base", classical], capsys)
        assert code == EXIT_CHECK and "pem" in err

    def test_missing_file(self, capsys, tmp_path):
        code, _, err = run(["check", tmp_path / "absent.dk"], capsys)
        assert code == EXIT_CHECK and "absent.dk" in err

    def test_pedantic_rejects_leibniz_rule(self, capsys):
        assert run(["check", LEIBNIZ], capsys)[0] == EXIT_OK
        assert run(["check", "--pedantic", LEIBNIZ], capsys)[0] == EXIT_VALIDATION

    def test_notes_only_when_verbose(self, capsys):
        arith = next(p for p in LIBRARY if p.name == "arithmetic.dk")
        _, _, quiet = run(["check", arith], capsys)
        _, _, loud = run(["check", "-v", arith], capsys)
        assert "note:" not in quiet and "note:" in loud


class TestTranslate:
    def test_to_file(self, capsys, tmp_path):
        out = tmp_path / "out.dk"
        code, _, err = run(["translate", LEIBNIZ, "-o", out], capsys)
        assert code == EXIT_OK, err
        text = out.read_text()
        assert "thm refl" in text and "all_i_i" in text
        assert recheck(text).ok

    def test_deterministic(self, capsys):
        outputs = {run(["translate", LEIBNIZ, "--stdout"], capsys)[1] for _ in range(3)}
        assert len(outputs) == 1

    def test_inline_output_has_no_prelude(self, capsys):
        code, out, _ = run(["translate", LEIBNIZ, "--stdout", "--inline-witnesses"], capsys)
        assert code == EXIT_OK
        assert "_i_i" not in out and "thm refl" in out
        assert recheck(out).ok

    def test_untidied_output_rechecks(self, capsys):
        code, out, _ = run(["translate", LEIBNIZ, "--stdout", "--no-tidy"], capsys)
        assert code == EXIT_OK
        assert "p : Prop => Prf (not (not p))" in out

    def test_needs_a_destination(self, capsys):
        with pytest.raises(SystemExit):
            main(["translate", str(LEIBNIZ)])

    def test_invalid_theory(self, capsys, write):
        code, out, _ = run(["translate", write("f : Prop -> Set."), "--stdout"], capsys)
        assert code == EXIT_VALIDATION and out == ""

    def test_prelude_name_clash(self, capsys):
        code, _, err = run(["translate", EXAMPLES / "addition.dk", "--stdout"], capsys)
        assert code == EXIT_VALIDATION and "reserved" in err

    def test_typing_error_stops_translation(self, capsys, write):
        code, out, _ = run(["translate", write("thm b : Prf bot := top_i."), "--stdout"], capsys)
        assert code == EXIT_CHECK and out == ""


class TestStats:
    def test_tsv(self, capsys):
        code, out, _ = run(["stats", "--tsv", *LIBRARY], capsys)
        assert code == EXIT_OK
        rows = [line.split("\t") for line in out.splitlines()]
        assert rows[0] == ["file", "proofs", "classical", "higher_order", "inference_rules"]
        assert [r[0] for r in rows[1:]] == [p.name for p in LIBRARY]

    def test_table_has_totals(self, capsys):
        _, out, _ = run(["stats", *LIBRARY], capsys)
        last = out.splitlines()[-1].split()
        assert last[0] == "all"
        assert int(last[1]) == sum(len(load(p)[1].theorems) for p in LIBRARY)

    def test_empty_file(self, capsys, write):
        code, out, _ = run(["stats", "--tsv", write("")], capsys)
        assert code == EXIT_OK
        assert out.splitlines()[1] == "input.dk\t0\t0\t0\t0"

    def test_classical_count_matches_excluded_middle_usage(self, capsys):
        # an independent count: theorems whose proof text mentions pem, plus
        # theorems that cite one of those
        path = next(p for p in LIBRARY if p.name == "de_morgan.dk")
        blocks = path.read_text().split("thm ")[1:]
        classical = set()
        for b in blocks:
            name, proof = b.split()[0], b.split(":=", 1)[1]
            words = set(proof.replace("(", " ").replace(")", " ").split())
            if "pem" in words or words & classical:
                classical.add(name)
        _, out, _ = run(["stats", "--tsv", path], capsys)
        assert int(out.splitlines()[1].split("\t")[2]) == len(classical) == 2


class TestCounters:
    def test_higher_order(self):
        assert is_higher_order(term("Prf (all o (p : El o => p))"))
        assert is_higher_order(term("Prf (ex (arrow o o) (f : El (arrow o o) => top))"))
        assert not is_higher_order(term("Prf (all nat0 (x : El nat0 => top))", variables=["nat0"]))

    def test_inference_rule(self):
        assert is_inference_rule(term("p : Prop -> Prf p -> Prf p"))
        assert not is_inference_rule(term("p : Prop -> Prf (imp p p)"))
        assert not is_inference_rule(term("Prop"))


class TestConfig:
    def test_budget_must_be_positive(self):
        with pytest.raises(ValueError):
            RunConfig("check", [], budget=0)

    def test_exit_code_ordering(self):
        r = Report()
        r.raise_to(EXIT_VALIDATION)
        r.raise_to(EXIT_OK)
        assert r.exit_code == EXIT_VALIDATION
        r.raise_to(EXIT_CHECK)
        r.raise_to(EXIT_VALIDATION)
        assert r.exit_code == EXIT_CHECK
        r.raise_to(EXIT_RECHECK)
        assert r.exit_code == EXIT_RECHECK


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "lpkuroda", "check", str(LEIBNIZ)],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0, proc.stderr
