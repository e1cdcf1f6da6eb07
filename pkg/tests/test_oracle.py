import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from photonpaths.circuit import Circuit, Detector, SinglePhoton
from photonpaths.entanglement import joint_distribution
from photonpaths.interference import first_order_amplitude
from photonpaths.oracle import (
    node_order,
    single_photon_oracle,
    transfer_matrix,
    two_photon_oracle,
)
from photonpaths.scenarios import build_jaeger, build_lemos, build_mzi


class TestSinglePhoton:
    def test_identity(self):
        c = Circuit(sources=(SinglePhoton("S", "m"),), detectors=(Detector("D", "m"),))
        assert single_photon_oracle(c, "S", "D") == 1

    def test_mzi(self):
        assert abs(single_photon_oracle(build_mzi(0), "S", "D6")) ** 2 == pytest.approx(1, abs=1e-12)

    def test_pair_rejected(self):
        with pytest.raises(ValueError):
            single_photon_oracle(build_jaeger(), "S", "U1")

    def test_matches_engine(self, single_corpus):
        for c in single_corpus:
            for d in c.detectors:
                assert abs(single_photon_oracle(c, "S", d.id) - first_order_amplitude(c, "S", d.id)) <= 1e-12


class TestTwoPhoton:
    def test_jaeger_zero(self):
        assert two_photon_oracle(build_jaeger(0, 0), "S", ("U1", "U2")) == pytest.approx(0, abs=1e-12)

    @pytest.mark.parametrize("outcome", [("U1", "U2"), ("U1", "L2"), ("L1", "U2"), ("L1", "L2")])
    def test_jaeger_quarter(self, outcome):
        assert two_photon_oracle(build_jaeger(math.pi / 4, math.pi / 4), "S", outcome) == pytest.approx(0.25)

    def test_lemos_passthrough(self):
        c = build_lemos(math.pi)
        assert two_photon_oracle(c, "NL", ("h", "Di")) == pytest.approx(1, abs=1e-12)

    def test_matches_engine(self, pair_corpus):
        for c in pair_corpus:
            table = joint_distribution(c)
            for o in table.outcomes:
                assert abs(two_photon_oracle(c, "S", o) - table.joint[o]) <= 1e-12


class TestOrderAndUnitarity:
    @settings(max_examples=30)
    @given(st.integers(0, 2**32 - 1), st.integers(0, 2**32 - 1))
    def test_random_topological_order(self, circuit_seed, order_seed):
        from photonpaths.corpus import random_single_photon_circuit

        c = random_single_photon_circuit(random.Random(circuit_seed))
        ref = transfer_matrix(c).matrix
        shuffled = transfer_matrix(c, random.Random(order_seed)).matrix
        assert abs(ref - shuffled).max() <= 1e-12

    @pytest.mark.parametrize("seed", range(5))
    def test_node_order_respects_edges(self, seed):
        seen = {"E1", "E0"}
        for node in node_order(build_mzi(0), random.Random(seed)):
            assert set(node.inputs) <= seen
            seen |= set(node.outputs)

    def test_corpus_unitary(self, single_corpus, pair_corpus):
        for c in single_corpus + pair_corpus:
            assert transfer_matrix(c).is_unitary(1e-10)

    def test_seeded_passthrough_not_square(self):
        # the aligned idler mode is both emitted and fed, so inputs outnumber detectors
        tm = transfer_matrix(build_lemos(0.0))
        assert tm.matrix.shape == (3, 4)
        assert not tm.is_unitary()
