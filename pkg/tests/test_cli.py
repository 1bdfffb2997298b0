import json

import pytest

from prestar.cli import run

from .conftest import FIG1_AUTOMATON, FIG1_GRAMMAR


@pytest.fixture
def files(tmp_path):
    def write(name, text):
        p = tmp_path / name
        p.write_text(text)
        return str(p)

    return write


@pytest.fixture
def fig1(files):
    return files("fig1.cfg", FIG1_GRAMMAR), files("fig1.aut", FIG1_AUTOMATON)


def test_member(fig1, capsys):
    g, _ = fig1
    assert run(["member", "-g", g, "--start", "B", "-w", "a b"]) == 0
    assert run(["member", "-g", g, "-w", "a b"]) == 1
    assert run(["member", "-g", g, "-w", "a z"]) == 2


def test_empty(files):
    assert run(["empty", "-g", files("loop.cfg", "S -> a S")]) == 0
    assert run(["empty", "-g", files("one.cfg", "S -> a")]) == 1


def test_prestar_dot_and_stats(fig1, tmp_path, capsys):
    g, a = fig1
    out = tmp_path / "out.dot"
    assert run(["prestar", "-g", g, "-a", a, "--dot", str(out), "--stats"]) == 0
    captured = capsys.readouterr()
    dot = out.read_text()
    assert dot.count("label=") == 11
    assert dot.count("style=dashed") == 8
    stats = json.loads(captured.err.strip().splitlines()[-1])
    assert stats == {"pops": 11, "unit_fires": 0, "binary_fires": 8, "adds": 8}
    assert captured.out.count("+ ") == 8


def test_prestar_is_deterministic(fig1, tmp_path, capsys):
    g, a = fig1
    outputs = []
    for i in range(2):
        out = tmp_path / f"out{i}.dot"
        run(["prestar", "-g", g, "-a", a, "--dot", str(out), "--stats"])
        outputs.append((out.read_bytes(), capsys.readouterr().err))
    assert outputs[0] == outputs[1]


def test_prestar_seeded_order_same_set(fig1, capsys):
    g, a = fig1
    run(["prestar", "-g", g, "-a", a])
    plain = sorted(capsys.readouterr().out.splitlines())
    run(["prestar", "-g", g, "-a", a, "--seed", "3"])
    assert sorted(capsys.readouterr().out.splitlines()) == plain


def test_set_queries_sorted(files, capsys):
    g = files("g.cfg", "S -> A B | a\nB -> b\nA -> eps\nC -> c\nD -> D")
    assert run(["useless", "-g", g]) == 0
    assert capsys.readouterr().out.split() == ["C", "D"]
    run(["productive", "-g", g])
    assert capsys.readouterr().out.split() == ["A", "B", "C", "S"]
    run(["reachable", "-g", g])
    assert capsys.readouterr().out.split() == ["A", "B", "S"]
    run(["nullable", "-g", g])
    assert capsys.readouterr().out.split() == ["A"]


def test_finite(files):
    assert run(["finite", "-g", files("f.cfg", "S -> a")]) == 0
    assert run(["finite", "-g", files("i.cfg", "S -> a S | a")]) == 1


def test_parse_output(fig1, files, capsys):
    g, _ = fig1
    assert run(["parse", "-g", g, "-w", "b b"]) == 0
    assert capsys.readouterr().out == "A -> B B\n  B -> b\n  B -> b\n"
    assert run(["parse", "-g", g, "-w", "a b"]) == 1
    assert "not in language" in capsys.readouterr().out
    anbn = files("anbn.cfg", "S -> a S b | eps")
    run(["parse", "-g", anbn, "-w", "a b"])
    assert capsys.readouterr().out == "S -> a S b\n  S -> eps\n"
    run(["parse", "-g", anbn, "-w", "a b", "--normalized"])
    assert "S#1" in capsys.readouterr().out


def test_contain(files):
    g = files("g.cfg", "S -> a S | eps")
    astar = files("astar.aut", "states: p\nfinal: p\np a p\n")
    nothing = files("none.aut", "states: p\n")
    assert run(["contain", "-g", g, "-a", astar, "--complement"]) == 0
    assert run(["contain", "-g", g, "-a", nothing]) == 0
    assert run(["contain", "-g", g, "-a", astar]) == 1
    gb = files("gb.cfg", "S -> b | a")
    assert run(["contain", "-g", gb, "-a", astar, "--complement"]) == 1


def test_contain_resource_cap(files):
    g = files("g.cfg", "S -> a S | b S | eps")
    k = 6
    lines = ["states: " + " ".join(f"s{i}" for i in range(k + 2)), "initial: s0", f"final: s{k + 1}",
             "s0 a s0", "s0 b s0", "s0 a s1"]
    lines += [f"s{i} {x} s{i + 1}" for i in range(1, k + 1) for x in "ab"]
    aut = files("big.aut", "\n".join(lines))
    assert run(["contain", "-g", g, "-a", aut, "--complement", "--max-dfa-states", "16"]) == 3
    assert run(["contain", "-g", g, "-a", aut, "--complement"]) == 1


def test_usage_errors(fig1, files, capsys):
    g, a = fig1
    assert run(["member", "-g", g]) == 2
    assert run(["contain", "-g", g]) == 2
    assert run(["bogus"]) == 2
    assert run(["member", "-g", g, "--start", "a", "-w", "a"]) == 2
    assert run(["empty", "-g", str(files("x", "")) + "-missing"]) == 2


def test_grammar_error_names_file_and_line(files, capsys):
    bad = files("bad.cfg", "S -> a\nT a\n")
    assert run(["empty", "-g", bad]) == 2
    assert "bad.cfg:2:" in capsys.readouterr().err


def test_oracle_subcommand(fig1, capsys):
    g, a = fig1
    assert run(["oracle", "-g", g, "-a", a]) == 0
    assert len(capsys.readouterr().out.splitlines()) == 11
