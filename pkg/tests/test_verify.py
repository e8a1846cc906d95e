"""
Unit tests for ground-truth verification and trace replay.
"""
import sys
import unittest
from pathlib import Path

# Add project root to path
sys.path.insert(0, str(Path(__file__).parent.parent))

from src.graph import Digraph, cycle_digraph, complete_digraph
from src.protocol import Trigger
from src.utils.config import Mode, SimConfig
from src.engine import (
    RoundTrace,
    SeededRNG,
    SelfLoopStubRNG,
    build_graph,
    make_rng,
    mix_seed,
    run_trial,
    trial_seed,
    run_average_degree,
    run_election_trial,
    run_network_size,
    replay_trace,
    ground_truth_verify,
    trial_from_trace,
)


def path3() -> Digraph:
    return Digraph.from_edges(3, [(0, 1), (1, 0), (1, 2), (2, 1)])


def traced_cycle_run():
    g = cycle_digraph(3)
    result = run_average_degree(g, SimConfig(d_prime=2, capture_trace=True), SeededRNG(1))
    return g, result


class TestGroundTruth(unittest.TestCase):
    """Test cases for ground_truth_verify."""

    def test_correct_trial_passes(self):
        """Test a clean run has no findings."""
        g, result = traced_cycle_run()
        report = ground_truth_verify(g, result, result.trace)
        self.assertTrue(report.ok, report.messages())

    def test_irregular_graph_passes(self):
        """Test a run that needs merging."""
        g = path3()
        result = run_average_degree(g, SimConfig(d_prime=2, capture_trace=True), SeededRNG(3))
        report = ground_truth_verify(g, result, result.trace)
        self.assertTrue(report.ok, report.messages())

    def test_forged_final(self):
        """Test a wrong final value is reported per node."""
        g, result = traced_cycle_run()
        result.finals[0] = (5, 1)
        report = ground_truth_verify(g, result)
        self.assertFalse(report.ok)
        self.assertTrue(any("final 5/1 != 1/1" in m for m in report.messages()))
        self.assertEqual(report.findings[0].node, 0)

    def test_deadlock_reported(self):
        """Test the frozen gt1 run."""
        g = path3()
        result = run_average_degree(g, SimConfig(d_prime=2, trigger=Trigger.GT1), SelfLoopStubRNG(1))
        report = ground_truth_verify(g, result)
        self.assertTrue(any("no transmissions after round 0, not converged" in m for m in report.messages()))

    def test_halt_off_boundary(self):
        """Test halting rounds must be multiples of d_prime."""
        g, result = traced_cycle_run()
        result.halt_rounds = [3, 3, 3]
        report = ground_truth_verify(g, result)
        self.assertTrue(any("not a multiple of d_prime" in m for m in report.messages()))

    def test_halt_not_simultaneous(self):
        """Test nodes halting on different rounds."""
        g, result = traced_cycle_run()
        result.halt_rounds = [2, 4, 4]
        report = ground_truth_verify(g, result)
        self.assertTrue(any("different rounds" in m for m in report.messages()))

    def test_election_trial(self):
        """Test a leader-election run."""
        g = complete_digraph(2)
        cfg = SimConfig(mode=Mode.LEADER_ELECTION, d_prime=1, u_v=10, eta_max=15, capture_trace=True)
        result = run_election_trial(g, cfg, SeededRNG(2))
        self.assertTrue(ground_truth_verify(g, result, result.trace).ok)

    def test_anonymous_trial(self):
        """Test a run without stopping."""
        g = cycle_digraph(3)
        cfg = SimConfig(mode=Mode.SIZE_ANONYMOUS, d_prime=2, capture_trace=True)
        result = run_network_size(g, cfg, SeededRNG(9))
        report = ground_truth_verify(g, result, result.trace)
        self.assertTrue(report.ok, report.messages())


class TestReplay(unittest.TestCase):
    """Test cases for trace replay."""

    def test_replay_matches_run(self):
        """Test replayed finals and halts equal the reported ones."""
        _, result = traced_cycle_run()
        replay = replay_trace(result.trace)
        self.assertEqual(replay.findings, [])
        self.assertEqual(replay.finals, result.finals)
        self.assertEqual(replay.halt_rounds, [2, 2, 2])
        self.assertEqual(replay.token_counts[0], 3)
        self.assertEqual(replay.mode, "avg-degree")
        self.assertEqual(replay.end["steps_halted"], 2)

    def test_tampered_send(self):
        """Test a send carrying more than its sender held."""
        g, result = traced_cycle_run()
        send = next(e for e in result.trace.events if e.kind == "send" and e.round == 1)
        send.fields["y"] += 1
        report = ground_truth_verify(g, result, result.trace)
        messages = report.messages()
        self.assertTrue(any("but held" in m for m in messages))
        self.assertTrue(any("mass not conserved" in m for m in messages))

    def test_trace_lines_round_trip(self):
        """Test replay from serialised lines."""
        _, result = traced_cycle_run()
        trace = RoundTrace.from_lines(result.trace.to_lines())
        self.assertEqual(replay_trace(trace).finals, result.finals)

    def test_corrections_conserve_mass(self):
        """Test (-1, 0) corrections are accounted for."""
        cfg = SimConfig(mode=Mode.SIZE_PAR_CORRECTION, d_prime=2, u_v=3, capture_trace=True)
        result = run_network_size(cycle_digraph(3), cfg, SeededRNG(8))
        replay = replay_trace(result.trace)
        self.assertEqual(replay.findings, [])
        self.assertEqual(replay.corrections, 3 - result.leader_count)

    def test_halt_with_unequal_votes(self):
        """Test a halt is rejected when the recorded votes disagree."""
        _, result = traced_cycle_run()
        vote = next(e for e in result.trace.events if e.kind == "vote" and e.fields["node"] == 0)
        vote.fields["max"] = "2/1"
        messages = [str(f) for f in replay_trace(result.trace).findings]
        self.assertTrue(any("halted with min vote 1/1 != max vote 2/1" in m for m in messages))

    def test_missing_node_count(self):
        """Test a trace without config and no n."""
        with self.assertRaises(ValueError):
            replay_trace(RoundTrace())


class TestTrialFromTrace(unittest.TestCase):
    """Test cases for rebuilding a trial from its trace."""

    def test_rebuild(self):
        """Test the rebuilt trial verifies like the original."""
        g, result = traced_cycle_run()
        rebuilt = trial_from_trace(g, result.trace)
        self.assertEqual(rebuilt.mode, Mode.AVG_DEGREE)
        self.assertEqual(rebuilt.steps_halted, 2)
        self.assertEqual(rebuilt.steps_converged, 0)
        self.assertTrue(rebuilt.halted)
        self.assertEqual(rebuilt.finals, result.finals)
        self.assertTrue(ground_truth_verify(g, rebuilt, result.trace).ok)


def corpus(mode: Mode, count: int, **overrides):
    """Traced trials on fresh graphs with n cycling through 3..30 and d_prime = D."""
    for index in range(count):
        cfg = SimConfig(
            mode=mode, n=3 + index % 28, edge_prob=0.5, d_prime_auto=True,
            master_seed=7, capture_trace=True, **overrides,
        )
        seed = trial_seed(cfg.master_seed, index)
        graph, _ = build_graph(cfg, seed)
        yield graph, run_trial(graph, cfg, make_rng("seeded", mix_seed(seed, 1)))


class TestCorpusProperties(unittest.TestCase):
    """Exactness, conservation and halting over a generated corpus."""

    def assert_halts_together(self, result):
        rounds = set(result.halt_rounds)
        self.assertEqual(len(rounds), 1)
        self.assertEqual(rounds.pop() % result.d_prime, 0)

    def test_average_degree_corpus(self):
        """Test every trial is exact, conserves mass and never gains tokens."""
        for graph, result in corpus(Mode.AVG_DEGREE, 56):
            with self.subTest(n=result.n):
                self.assertTrue(result.halted)
                self.assertEqual(ground_truth_verify(graph, result, result.trace).messages(), [])
                self.assert_halts_together(result)
                total = graph.edge_count
                for y, z in result.finals:
                    self.assertEqual(y * result.n, total * z)

                replay = replay_trace(result.trace)
                self.assertEqual(replay.findings, [])
                counts = [replay.token_counts[r] for r in sorted(replay.token_counts)]
                self.assertEqual(counts[0], result.n)
                self.assertTrue(all(a >= b for a, b in zip(counts, counts[1:])))
                self.assertGreaterEqual(counts[-1], 1)

    def test_network_size_corpus(self):
        """Test single-leader size trials end with z = n at every node."""
        for mode in (Mode.SIZE_SEQ, Mode.SIZE_PAR_ORACLE, Mode.SIZE_PAR_CORRECTION):
            checked = 0
            for graph, result in corpus(mode, 28, u_v=20, eta_max=255):
                if result.leader_count != 1:
                    continue
                checked += 1
                with self.subTest(mode=mode.value, n=result.n):
                    self.assertTrue(result.halted)
                    self.assertEqual(ground_truth_verify(graph, result, result.trace).messages(), [])
                    self.assert_halts_together(result)
                    self.assertEqual([z for _, z in result.finals], [result.n] * result.n)
                    self.assertEqual(replay_trace(result.trace).findings, [])
            self.assertGreaterEqual(checked, 26)


if __name__ == "__main__":
    unittest.main()
