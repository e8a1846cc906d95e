"""
Unit tests for the round scheduler, trial runners and sweeps.
"""
import os
import sys
import tempfile
import unittest
from unittest.mock import MagicMock, patch
from pathlib import Path

# Add project root to path
sys.path.insert(0, str(Path(__file__).parent.parent))

from src.graph import Digraph, NotStronglyConnectedError, cycle_digraph, complete_digraph
from src.protocol import MassMessage, Ratio, Trigger
from src.utils.config import Mode, SimConfig
from src.engine import (
    SeededRNG,
    SelfLoopStubRNG,
    ConstantDrawRNG,
    make_rng,
    mix_seed,
    splitmix64,
    RoundTrace,
    TraceEvent,
    World,
    make_nodes,
    step_round,
    check_d_prime,
    run_leader_election,
    run_quantized_average,
    run_average_degree,
    run_network_size,
    run_election_trial,
    run_trial,
    run_single_trial,
    run_sweep,
    trial_seed,
    build_graph,
)


def path3() -> Digraph:
    """Bidirectional path 0 <-> 1 <-> 2 (out-degrees 1, 2, 1)."""
    return Digraph.from_edges(3, [(0, 1), (1, 0), (1, 2), (2, 1)])


class TestRandomSources(unittest.TestCase):
    """Test cases for the seeded random sources."""

    def test_splitmix_reference_value(self):
        """Test the first SplitMix64 output from state 0."""
        self.assertEqual(splitmix64(0), 16294208416658607535)

    def test_mix_seed_streams_differ(self):
        """Test derived seeds differ per index."""
        self.assertNotEqual(mix_seed(1, 0), mix_seed(1, 1))
        self.assertEqual(mix_seed(5, 3), mix_seed(5, 3))

    def test_seeded_reproducible(self):
        """Test same seed, same draws."""
        a, b = SeededRNG(9), SeededRNG(9)
        self.assertEqual([a.random() for _ in range(5)], [b.random() for _ in range(5)])

    def test_stub_always_self(self):
        """Test the self-loop stub picks the last target."""
        node = make_nodes(complete_digraph(4))[2]
        self.assertEqual(node.targets.choose(SelfLoopStubRNG(1).random()), 2)

    def test_constant_draw_clamped(self):
        """Test the constant draw stays in range."""
        self.assertEqual(ConstantDrawRNG(1, 99).randint(0, 15), 15)

    def test_unknown_kind(self):
        """Test make_rng with a bad name."""
        with self.assertRaises(ValueError):
            make_rng("mersenne", 1)


class TestTrace(unittest.TestCase):
    """Test cases for the round trace."""

    def test_line_round_trip(self):
        """Test one event survives JSON lines."""
        event = TraceEvent(3, "send", {"src": 0, "dst": 1, "y": 2, "z": 1})
        self.assertEqual(TraceEvent.from_line(event.to_line()), event)

    def test_disabled_records_nothing(self):
        """Test a disabled trace."""
        trace = RoundTrace(enabled=False)
        trace.record(1, "halt", node=0)
        self.assertEqual(len(trace), 0)

    def test_write_and_load(self):
        """Test a trace file written into a new directory loads back."""
        trace = RoundTrace()
        trace.record(0, "config", mode="avg-degree", n=3)
        trace.record(1, "vote", node=2, min="1/2", max="2/4")
        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, "nested", "trace.jsonl")
            trace.write(path)
            self.assertEqual(RoundTrace.load(path).events, trace.events)
            with self.assertRaises(FileNotFoundError):
                RoundTrace.load(os.path.join(tmp, "missing.jsonl"))


class TestStepRound(unittest.TestCase):
    """Test cases for the scheduler phases."""

    def test_votes_merge_without_masses(self):
        """Test a round with nothing held only spreads votes."""
        g = cycle_digraph(3)
        nodes = make_nodes(g)
        nodes[0].state_y = 3
        nodes[0].vote_max = Ratio(3, 1)
        nodes[0].vote_min = Ratio(3, 1)
        world = World(graph=g, nodes=nodes, rng=SeededRNG(1), d_prime=3, round=1, mass_start=1, stop_from=3)
        step_round(world)
        self.assertEqual(world.round, 2)
        self.assertEqual(nodes[1].vote_max, Ratio(3, 1))
        self.assertEqual(nodes[1].vote_min, Ratio(0, 1))
        self.assertEqual(nodes[2].vote_max, Ratio(0, 1))
        self.assertEqual(world.in_flight, [])
        self.assertFalse(any(node.halted for node in nodes))

    def test_equal_votes_halt_at_boundary(self):
        """Test every node halts when all votes agree at a cycle end."""
        g = cycle_digraph(3)
        world = World(graph=g, nodes=make_nodes(g), rng=SeededRNG(1), d_prime=3, round=2, mass_start=1, stop_from=3)
        step_round(world)
        self.assertTrue(world.all_halted)
        self.assertEqual(world.halt_rounds, [3, 3, 3])
        self.assertEqual(world.last_check_round, 3)

    def test_delivery_then_transmit(self):
        """Test a mass sent last round is stamped and forwarded."""
        g = cycle_digraph(3)
        nodes = make_nodes(g)
        world = World(graph=g, nodes=nodes, rng=SelfLoopStubRNG(1), d_prime=2, mass_start=1)
        world.in_flight = [(1, MassMessage(5, 2))]
        step_round(world)
        self.assertEqual((nodes[1].state_y, nodes[1].state_z), (5, 2))
        self.assertEqual(world.in_flight, [(1, MassMessage(5, 2))])
        self.assertEqual(world.last_send_round, 1)


class TestAverageDegree(unittest.TestCase):
    """Test cases for average-degree trials."""

    def test_cycle_halts_at_first_check(self):
        """Test a regular digraph is converged from the start."""
        cfg = SimConfig(d_prime=2, capture_trace=True)
        result = run_average_degree(cycle_digraph(3), cfg, SeededRNG(1))
        self.assertEqual(result.mode, Mode.AVG_DEGREE)
        self.assertEqual(result.steps_converged, 0)
        self.assertEqual(result.steps_halted, 2)
        self.assertTrue(result.halted)
        self.assertTrue(result.correct)
        self.assertEqual(result.halt_rounds, [2, 2, 2])
        self.assertEqual(result.trace.events[0].kind, "config")
        self.assertEqual(result.trace.events[-1].kind, "end")

    def test_random_graph_exact(self):
        """Test the exact average on an irregular graph."""
        g = path3()
        cfg = SimConfig(d_prime=2)
        result = run_average_degree(g, cfg, SeededRNG(3))
        self.assertTrue(result.halted)
        self.assertTrue(result.correct)
        for y, z in result.finals:
            self.assertEqual(3 * y, 4 * z)
        self.assertEqual(result.steps_halted % 2, 0)
        self.assertGreaterEqual(result.steps_halted, result.steps_converged)

    def test_gt1_self_loop_deadlock(self):
        """Test gt1 with every token parked on its sender."""
        cfg = SimConfig(d_prime=2, trigger=Trigger.GT1)
        result = run_average_degree(path3(), cfg, SelfLoopStubRNG(1))
        self.assertTrue(result.deadlocked)
        self.assertFalse(result.halted)
        self.assertFalse(result.correct)
        self.assertEqual(result.last_send_round, 0)
        self.assertIsNone(result.steps_halted)

    def test_d_prime_below_diameter_warns(self):
        """Test a run with d_prime < D records the warning."""
        result = run_average_degree(cycle_digraph(5), SimConfig(d_prime=2), SeededRNG(1))
        self.assertTrue(any("d_prime 2 < diameter 4" in v for v in result.violations))

    def test_d_prime_auto(self):
        """Test d_prime taken from the diameter."""
        result = run_average_degree(cycle_digraph(5), SimConfig(d_prime=2, d_prime_auto=True), SeededRNG(1))
        self.assertEqual(result.d_prime, 4)
        self.assertEqual(result.violations, [])

    def test_not_strongly_connected(self):
        """Test rejection of a graph that is not strongly connected."""
        g = Digraph.from_edges(3, [(0, 1), (1, 2), (2, 1)])
        with self.assertRaises(NotStronglyConnectedError):
            run_average_degree(g, SimConfig(d_prime=2), SeededRNG(1))

    def test_check_d_prime(self):
        """Test the D' check."""
        self.assertTrue(check_d_prime(3, 3)[0])
        self.assertFalse(check_d_prime(3, 2)[0])


class TestQuantizedAverage(unittest.TestCase):
    """Test cases for the general integer average."""

    def test_exact_average(self):
        """Test arbitrary integers reach their exact average."""
        g = complete_digraph(4)
        cfg = SimConfig(mode=Mode.AVERAGE, d_prime=1, initial_values=[3, -1, 7, 1])
        result = run_quantized_average(g, cfg.initial_values, cfg, SeededRNG(4))
        self.assertTrue(result.halted)
        self.assertTrue(result.correct)
        for y, z in result.finals:
            self.assertEqual(4 * y, 10 * z)

    def test_value_count_mismatch(self):
        """Test one value per node."""
        cfg = SimConfig(mode=Mode.AVERAGE, d_prime=1, initial_values=[1, 2])
        with self.assertRaises(ValueError):
            run_quantized_average(complete_digraph(3), [1, 2], cfg, SeededRNG(1))


class TestLeaderElection(unittest.TestCase):
    """Test cases for the election runner."""

    def test_two_nodes_single_leader(self):
        """Test n=2 with 10 rounds almost surely leaves one leader."""
        cfg = SimConfig(d_prime=1, u_v=10, eta_max=15)
        outcome = run_leader_election(complete_digraph(2), cfg, SeededRNG(2))
        self.assertEqual(outcome.leader_count, 1)
        self.assertEqual(outcome.rounds, 10)
        self.assertEqual(len(outcome.leaders_by_round), 10)
        self.assertEqual(len(outcome.leaders), 1)

    def test_constant_draws_keep_everyone(self):
        """Test all-equal draws never demote anyone."""
        cfg = SimConfig(d_prime=2, u_v=3, eta_max=15)
        outcome = run_leader_election(cycle_digraph(3), cfg, ConstantDrawRNG(1, 5))
        self.assertEqual(outcome.leader_count, 3)
        self.assertEqual(outcome.leaders_by_round, [3, 3, 3])

    def test_at_least_one_leader(self):
        """Test the maximum drawer always survives."""
        cfg = SimConfig(d_prime=2, u_v=4, eta_max=3)
        for seed in range(10):
            outcome = run_leader_election(cycle_digraph(4), cfg, SeededRNG(seed))
            self.assertGreaterEqual(outcome.leader_count, 1)

    def test_election_trial(self):
        """Test the election reported as a trial."""
        cfg = SimConfig(mode=Mode.LEADER_ELECTION, d_prime=1, u_v=10, eta_max=15)
        result = run_election_trial(complete_digraph(2), cfg, SeededRNG(2))
        self.assertTrue(result.correct)
        self.assertEqual(result.steps_halted, 10)
        self.assertEqual(sorted(result.finals), [(0, 1), (1, 1)])
        self.assertIsNotNone(result.steps_converged)


class TestNetworkSize(unittest.TestCase):
    """Test cases for the size modes."""

    def test_fixed_leader_sequential(self):
        """Test a preset leader skips the election."""
        cfg = SimConfig(mode=Mode.SIZE_SEQ, d_prime=2, fixed_leader=0)
        result = run_network_size(cycle_digraph(3), cfg, SeededRNG(5))
        self.assertTrue(result.halted)
        self.assertTrue(result.correct)
        self.assertEqual(result.finals, [(1, 3), (1, 3), (1, 3)])
        self.assertEqual(result.leader_count, 1)

    def test_sequential_with_election(self):
        """Test the size iteration starts after the election."""
        cfg = SimConfig(mode=Mode.SIZE_SEQ, d_prime=2, u_v=3)
        result = run_network_size(cycle_digraph(3), cfg, SeededRNG(6))
        self.assertTrue(result.halted)
        self.assertGreater(result.steps_halted, 6)
        self.assertEqual(result.steps_halted % 2, 0)
        self.assertEqual(len(result.leaders_by_round), 3)

    def test_parallel_oracle_reports_election_floor(self):
        """Test halting is reported no earlier than the election end."""
        cfg = SimConfig(mode=Mode.SIZE_PAR_ORACLE, d_prime=2, u_v=10)
        result = run_network_size(cycle_digraph(3), cfg, SeededRNG(7))
        self.assertTrue(result.halted)
        self.assertGreaterEqual(result.steps_halted, 20)

    def test_parallel_correction(self):
        """Test corrections keep the run going past the election."""
        cfg = SimConfig(mode=Mode.SIZE_PAR_CORRECTION, d_prime=2, u_v=3, capture_trace=True)
        result = run_network_size(cycle_digraph(3), cfg, SeededRNG(8))
        self.assertTrue(result.halted)
        self.assertGreaterEqual(result.steps_halted, 8)
        corrections = result.trace.of_kind("correction")
        self.assertEqual(len(corrections), 3 - result.leader_count)

    def test_anonymous(self):
        """Test the leaderless variant stops on convergence."""
        cfg = SimConfig(mode=Mode.SIZE_ANONYMOUS, d_prime=2)
        result = run_network_size(cycle_digraph(3), cfg, SeededRNG(9))
        self.assertTrue(result.halted)
        self.assertIsNone(result.steps_halted)
        self.assertEqual([z for _, z in result.finals], [3, 3, 3])
        self.assertEqual(result.leader_count, 0)

    def test_rejects_non_size_mode(self):
        """Test mode dispatch."""
        with self.assertRaises(ValueError):
            run_network_size(cycle_digraph(3), SimConfig(d_prime=2), SeededRNG(1))

    def test_fixed_leader_out_of_range(self):
        """Test a leader id beyond the graph."""
        cfg = SimConfig(mode=Mode.SIZE_SEQ, d_prime=2, fixed_leader=7)
        with self.assertRaises(ValueError):
            run_network_size(cycle_digraph(3), cfg, SeededRNG(1))


class TestRunTrial(unittest.TestCase):
    """Test cases for dispatch, determinism and sweeps."""

    def test_dispatch(self):
        """Test run_trial picks the runner by mode."""
        cfg = SimConfig(mode=Mode.SIZE_SEQ, d_prime=2, fixed_leader=1)
        self.assertEqual(run_trial(cycle_digraph(3), cfg, SeededRNG(1)).mode, Mode.SIZE_SEQ)

    def test_states_capture(self):
        """Test per-round state snapshots."""
        cfg = SimConfig(d_prime=2, capture_states=True)
        result = run_trial(cycle_digraph(3), cfg, SeededRNG(1))
        self.assertEqual(result.states[0], (0, [(1, 1), (1, 1), (1, 1)]))
        self.assertEqual(result.states[-1][0], 2)

    def test_single_trial_deterministic(self):
        """Test the same master seed reproduces the trial."""
        cfg = SimConfig(n=6, edge_prob=0.5, d_prime=5, master_seed=11, capture_trace=True, capture_states=True)
        a, _ = run_single_trial(cfg, 2)
        b, _ = run_single_trial(cfg, 2)
        self.assertEqual(a, b)
        self.assertEqual(a.trace.to_lines(), b.trace.to_lines())
        self.assertEqual(a.states, b.states)
        self.assertEqual(a.seed, trial_seed(11, 2))
        self.assertEqual(a.trial, 2)

    def test_single_trial_rng_stream(self):
        """Test the protocol stream is derived from the trial seed."""
        g = cycle_digraph(3)
        cfg = SimConfig(d_prime=2, master_seed=5)
        with patch("src.engine.sweep.run_trial") as fake:
            fake.return_value = MagicMock()
            result, rejected = run_single_trial(cfg, 3, graph=g)
        graph, _, rng = fake.call_args[0]
        self.assertIs(graph, g)
        self.assertEqual(rng.seed, mix_seed(trial_seed(5, 3), 1))
        self.assertEqual((result.trial, rejected), (3, 0))

    def test_build_graph_deterministic(self):
        """Test graph generation from the trial seed."""
        cfg = SimConfig(n=7, edge_prob=0.4)
        self.assertEqual(build_graph(cfg, 123)[0], build_graph(cfg, 123)[0])

    def test_sweep_order_independent_of_workers(self):
        """Test a parallel sweep returns the serial results in order."""
        cfg = SimConfig(n=6, edge_prob=0.5, d_prime=5, trials=4, master_seed=3)
        serial = run_sweep(cfg, workers=1)
        parallel = run_sweep(cfg, workers=2)
        self.assertEqual(serial.results, parallel.results)
        self.assertEqual([r.trial for r in serial.results], [0, 1, 2, 3])
        self.assertEqual(serial.failures, [])


if __name__ == "__main__":
    unittest.main()
