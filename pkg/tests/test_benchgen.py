import json

import pytest

from rcpsolve.benchgen import BioSpec, PcpSpec, gen_bio, gen_pcp, lowercase_preimage, pcp_solution, transcribe
from rcpsolve.frontend import load
from rcpsolve.functions import evaluate
from rcpsolve.ordering import is_straight_line
from rcpsolve.search import verify_model


def test_pcp_solution_search():
    assert pcp_solution(["1", "10111", "10"], ["111", "10", "0"]) == [1, 0, 0, 2]
    assert pcp_solution(["10"], ["01"]) is None


def test_pcp_generation_is_seeded():
    a, b = gen_pcp(PcpSpec(seed=7)), gen_pcp(PcpSpec(seed=7))
    assert a.text == b.text and a.manifest == b.manifest
    assert gen_pcp(PcpSpec(seed=8)).text != a.text


@pytest.mark.parametrize("seed", range(20))
def test_planted_pcp_models_verify(seed):
    inst = gen_pcp(PcpSpec(seed=seed))
    root, table = load(inst.text)
    if inst.verdict == "sat":
        m = dict(inst.manifest["planted_model"])
        for e in root.equations:
            if e.lhs not in m:
                m[e.lhs] = evaluate(e.rhs, [m[v] for v in e.rhs_vars])
        assert verify_model(root, m)
    else:
        assert inst.verdict == "unknown-truth"


def test_pcp_replaceall_encoding():
    inst = gen_pcp(PcpSpec(num_dominos=1, tops=["10"], bottoms=["01"], encoding="replaceall"))
    assert "str.replace_all" in inst.text
    with pytest.raises(ValueError):
        PcpSpec(num_dominos=2, encoding="replaceall")


def test_transcription():
    assert transcribe("uagc") == "ATCG"
    assert lowercase_preimage("ATCG") == "uagc"


@pytest.mark.parametrize("want_sat", [True, False])
def test_bio_instances(want_sat):
    inst = gen_bio(BioSpec(want_sat=want_sat, seed=3))
    root, _ = load(inst.text)
    assert is_straight_line(root.equations)
    assert len(inst.manifest["dna"]) == 200 and len(inst.manifest["pattern"]) == 15
    if want_sat:
        assert verify_model(root, {**inst.manifest["planted_model"]})
    else:
        assert inst.manifest["pattern"] not in lowercase_preimage(inst.manifest["dna"])


def test_write(tmp_path):
    smt, man = gen_bio(BioSpec(dna_len=30, pattern_len=4, seed=1)).write(str(tmp_path))
    assert open(smt).read().startswith(";")
    assert json.load(open(man))["verdict"] == "sat"
