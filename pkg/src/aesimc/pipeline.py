"""Round scheduling and cycle/energy accounting across the two lanes and
across banks. The default calibrated preset ("ref26") totals 26 cycles per
128-bit block: load, initial AddRoundKey, nine 2-cycle rounds, a 2-cycle
final round without MixColumns, and a 4-cycle drain/readout."""

from dataclasses import dataclass

import numpy as np

from . import gfref
from .crossbar import ConfigError, CostTable, TraceRecorder
from .sequencer import LanePairSequencer


@dataclass(frozen=True)
class ScheduleStage:
    name: str
    cycles: int


class Schedule:
    """Ordered stage budgets along one block's critical path."""

    def __init__(self, stages, declared_total=None):
        for st in stages:
            if st.cycles < 0:
                raise ConfigError("negative stage budget: %s" % st.name)
        self.stages = list(stages)
        total = sum(st.cycles for st in stages)
        if declared_total is not None and declared_total != total:
            raise ConfigError(
                "declared total %d != stage sum %d" % (declared_total, total)
            )
        self.total_cycles_per_block = total

    @classmethod
    def from_cost_table(cls, cost, crosslane_extra_cycles_per_byte=0):
        """Reference 26-cycle decomposition. With unit latencies: 1 load +
        1 initial ARK + 9 x 2-cycle rounds + 2-cycle final round + 4
        drain = 26. Budgets scale with the cost-table latencies.

        ShiftRows moves 8 bytes per block between lanes (enumerating the
        rotation destinations for rows 1-3 under the column-pair split);
        any configured per-byte port penalty lands on the round stages."""
        xlane = crosslane_extra_cycles_per_byte * 8
        stages = [ScheduleStage("load", cost["ROW_WRITE"].cycles)]
        stages.append(ScheduleStage("initial_ark", cost["SA_XOR"].cycles))
        for rnd in range(1, gfref.N_ROUNDS):
            stages.append(
                ScheduleStage(
                    "round_%d" % rnd,
                    cost["SBOX_EVAL"].cycles + cost["M2_EVAL"].cycles + xlane,
                )
            )
        stages.append(
            ScheduleStage(
                "round_10", cost["SBOX_EVAL"].cycles + cost["SA_XOR"].cycles + xlane
            )
        )
        stages.append(ScheduleStage("drain", 4 * cost["BUFFER_WRITEBACK"].cycles))
        return cls(stages)


@dataclass
class AggregateReport:
    blocks: int
    cycles_total: int
    energy_pJ_total: float
    cycles_per_block: int
    energy_per_block_pJ: float
    config_hash: str

    def to_dict(self):
        return {
            "blocks": self.blocks,
            "cycles_total": self.cycles_total,
            "energy_pJ_total": self.energy_pJ_total,
            "cycles_per_block": self.cycles_per_block,
            "energy_per_block_pJ": self.energy_per_block_pJ,
            "config_hash": self.config_hash,
        }


class Pipeline:
    """One bank: a lane pair plus its schedule. Correctness never
    depends on the cost table, schedule, or parallelism knobs; those
    affect only the reported cycles and energy."""

    def __init__(self, cost_table=None, schedule=None, layout=None,
                 parallelism=None, rows=16, cols=16, bank=0,
                 initiation_interval=None, trace_detail=False,
                 config_hash=""):
        self.cost_table = cost_table or CostTable.default()
        self.schedule = schedule or Schedule.from_cost_table(self.cost_table)
        self.layout = layout
        self.parallelism = parallelism
        self.rows = rows
        self.cols = cols
        self.bank = bank
        self.trace_detail = trace_detail
        self.config_hash = config_hash
        if initiation_interval is None:
            initiation_interval = self.schedule.total_cycles_per_block
        if initiation_interval < 1:
            raise ConfigError("initiation interval must be >= 1")
        self.initiation_interval = initiation_interval
        self.trace = TraceRecorder(detail=trace_detail)

    def _make_sequencer(self, batch):
        return LanePairSequencer(
            self.cost_table, self.trace, layout=self.layout,
            parallelism=self.parallelism, rows=self.rows, cols=self.cols,
            bank=self.bank, batch=batch,
        )

    def _run_scheduled(self, seq, plaintexts, keys):
        """Drive the phases stage by stage so trace events carry the
        cycle at which their stage starts."""
        stages = self.schedule.stages
        cursor = 0
        stage_iter = iter(stages)

        def enter(expected_prefix):
            nonlocal cursor
            st = next(stage_iter)
            if not st.name.startswith(expected_prefix):
                raise ConfigError("schedule stage %s out of order" % st.name)
            self.trace.cycle = cursor
            cursor += st.cycles

        enter("load")
        seq.load_block(plaintexts, keys)
        enter("initial_ark")
        seq.seq_add_round_key()
        for rnd in range(1, gfref.N_ROUNDS + 1):
            enter("round_")
            seq.seq_sub_bytes()
            seq.seq_shift_rows()
            if rnd < gfref.N_ROUNDS:
                seq.seq_mix_columns()
            seq.seq_key_round_update(rnd)
            seq.seq_add_round_key()
        enter("drain")
        return seq.readout_block()

    def run_batch(self, plaintexts, keys):
        """Encrypt a batch of independent blocks through one identical
        micro-op sequence. Returns (ciphertexts, cycles_per_block,
        energy_per_block_pJ)."""
        plaintexts = np.asarray(plaintexts, dtype=np.uint8)
        keys = np.asarray(keys, dtype=np.uint8)
        batch = plaintexts.reshape(-1, 16).shape[0]
        self.trace.reset()
        seq = self._make_sequencer(batch)
        cts = self._run_scheduled(seq, plaintexts, keys)
        return cts, self.schedule.total_cycles_per_block, self.trace.energy_pJ

    def run_block(self, plaintext, key):
        """Encrypt one 16-byte block; returns (ct, cycles, energy_pJ)."""
        cts, cycles, energy = self.run_batch(
            np.frombuffer(bytes(plaintext), dtype=np.uint8).reshape(1, 16),
            np.frombuffer(bytes(key), dtype=np.uint8).reshape(1, 16),
        )
        return bytes(cts[0]), cycles, energy

    def stream_cycles(self, n_blocks):
        """Fill latency plus (n-1) initiation intervals."""
        if n_blocks < 1:
            raise ConfigError("need at least one block")
        return (
            self.schedule.total_cycles_per_block
            + (n_blocks - 1) * self.initiation_interval
        )

    def run_stream(self, plaintexts, keys):
        """Encrypt a sequence of blocks and aggregate cycles/energy."""
        cts, _, energy_per_block = self.run_batch(plaintexts, keys)
        n = len(cts)
        return cts, AggregateReport(
            blocks=n,
            cycles_total=self.stream_cycles(n),
            energy_pJ_total=energy_per_block * n,
            cycles_per_block=self.schedule.total_cycles_per_block,
            energy_per_block_pJ=energy_per_block,
            config_hash=self.config_hash,
        )


class BankFarm:
    """Independent banks encrypting blocks concurrently, fed round-robin.
    A shared key generator is modeled per lane pair; results are
    independent of the bank count."""

    def __init__(self, banks=1, **pipeline_kwargs):
        if banks < 1:
            raise ConfigError("banks must be >= 1")
        self.banks = banks
        self.pipelines = [
            Pipeline(bank=i, **pipeline_kwargs) for i in range(banks)
        ]

    def run_banked(self, plaintexts, keys):
        plaintexts = np.asarray(plaintexts, dtype=np.uint8).reshape(-1, 16)
        keys = np.asarray(keys, dtype=np.uint8).reshape(-1, 16)
        n = plaintexts.shape[0]
        if n < 1:
            raise ConfigError("need at least one block")
        cts = np.empty_like(plaintexts)
        energy_total = 0.0
        wall_cycles = 0
        for b, pipe in enumerate(self.pipelines):
            idx = list(range(b, n, self.banks))
            if not idx:
                continue
            bank_cts, report = pipe.run_stream(plaintexts[idx], keys[idx])
            cts[idx] = bank_cts
            energy_total += report.energy_pJ_total
            wall_cycles = max(wall_cycles, report.cycles_total)
        per_block = self.pipelines[0].schedule.total_cycles_per_block
        return cts, AggregateReport(
            blocks=n,
            cycles_total=wall_cycles,
            energy_pJ_total=energy_total,
            cycles_per_block=per_block,
            energy_per_block_pJ=energy_total / n,
            config_hash=self.pipelines[0].config_hash,
        )
