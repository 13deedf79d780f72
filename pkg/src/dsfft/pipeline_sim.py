"""Cycle-level model of the pipelined digit-slicing butterfly, plus a cost model.

The simulated datapath is a chain of ``depth`` registers accepting one input
per cycle. Input ``i`` is presented during cycle ``i`` and its result is
visible at the last register from cycle ``depth + i`` on.
"""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import kernels
from .butterfly import ComplexFx, RequantPolicy, TwiddleTables
from .digit_slicing import SliceParams
from .fixedpoint import NEAREST_EVEN, WRAP, QFormat, fit_raw, round_shift
from .scml import combine_level, tree_depth

SLICE_ROM = "slice+rom_lookup"
ADDSUB = "butterfly_addsub"
REQUANT = "requant"
DELAY = "delay"


def partial_add(level: int) -> str:
    return f"partial_add({level})"


def micro_ops(b: int) -> list[str]:
    """Canonical operation order of the digit-slicing butterfly."""
    return [SLICE_ROM, *(partial_add(lv) for lv in range(1, tree_depth(b) + 1)), ADDSUB, REQUANT]


@dataclass(frozen=True)
class PipelineConfig:
    """Register stages; each stage runs one or more micro-ops between registers."""

    stages: tuple[tuple[str, ...], ...]

    def __post_init__(self):
        if not self.stages:
            raise ValueError("a pipeline needs at least one stage")

    @property
    def depth(self) -> int:
        return len(self.stages)

    @property
    def names(self) -> list[str]:
        return ["+".join(s) for s in self.stages]

    @classmethod
    def default(cls, b: int = 4) -> "PipelineConfig":
        return cls(tuple((op,) for op in micro_ops(b)))

    @classmethod
    def with_depth(cls, depth: int, b: int = 4) -> "PipelineConfig":
        """Spread the micro-ops over ``depth`` registers.

        Shallower pipelines merge neighbouring ops into one stage, deeper ones
        append output retiming (delay) registers.
        """
        if depth < 1:
            raise ValueError("depth must be >= 1")
        ops = micro_ops(b)
        if depth >= len(ops):
            return cls(tuple((op,) for op in ops) + ((DELAY,),) * (depth - len(ops)))
        size, extra = divmod(len(ops), depth)
        stages, i = [], 0
        for s in range(depth):
            n = size + (1 if s < extra else 0)
            stages.append(tuple(ops[i:i + n]))
            i += n
        return cls(tuple(stages))


class _Datapath:
    """Raw-integer butterfly micro-ops over a token dict."""

    def __init__(self, t: TwiddleTables, q: Optional[RequantPolicy], in_fmt: QFormat):
        self.p = t.wr_table.params.p
        self.b = t.wr_table.params.b
        self.rom_r = t.wr_table.roms
        self.rom_i = t.wi_table.roms
        self.a_shift = t.wr.fmt.frac
        self.q = q
        if q is not None:
            self.shift = in_fmt.frac + t.wr.fmt.frac + q.extra_shift - q.out_fmt.frac

    def slice_rom(self, tok):
        p, mask = self.p, (1 << self.p) - 1
        br, bi = tok["b"]
        codes_r = [(br >> (p * k)) & mask for k in range(self.b)]
        codes_i = [(bi >> (p * k)) & mask for k in range(self.b)]
        rr, ri = self.rom_r, self.rom_i
        tok["partials"] = {
            "rr": tuple(rr[k][s] for k, s in enumerate(codes_r)),
            "ii": tuple(ri[k][s] for k, s in enumerate(codes_i)),
            "ri": tuple(rr[k][s] for k, s in enumerate(codes_i)),
            "ir": tuple(ri[k][s] for k, s in enumerate(codes_r)),
        }
        if "trace" in tok:
            tok["trace"].append(dict(tok["partials"]))

    def add_level(self, tok, level):
        shift = self.p << (level - 1)
        tok["partials"] = {
            key: combine_level(vals, shift).partials for key, vals in tok["partials"].items()
        }
        if "trace" in tok:
            tok["trace"].append(dict(tok["partials"]))

    def addsub(self, tok):
        pr = tok.pop("partials")
        wb_r = pr["rr"][0] + pr["ii"][0]
        wb_i = pr["ri"][0] - pr["ir"][0]
        ar, ai = (v << self.a_shift for v in tok["a"])
        tok["out"] = (ar + wb_r, ai + wb_i, ar - wb_r, ai - wb_i)

    def requant(self, tok):
        q = self.q
        if q is None:
            return
        tok["out"] = tuple(
            fit_raw(round_shift(v, self.shift, q.rounding), q.out_fmt, q.overflow)
            for v in tok["out"]
        )

    def run(self, op, tok):
        if op == SLICE_ROM:
            self.slice_rom(tok)
        elif op.startswith("partial_add("):
            self.add_level(tok, int(op[len("partial_add("):-1]))
        elif op == ADDSUB:
            self.addsub(tok)
        elif op == REQUANT:
            self.requant(tok)
        elif op != DELAY:
            raise ValueError(f"unknown stage op {op!r}")


class PipelineSimulator:
    """Clocked register chain driven one input per cycle.

    With ``keep_trace`` each output token keeps the per-level ROM/adder
    partials in ``self.traces`` (one list per output, in output order).
    """

    def __init__(self, cfg: PipelineConfig, t: TwiddleTables, q: Optional[RequantPolicy],
                 in_fmt: QFormat, keep_trace: bool = False):
        ops = [op for stage in cfg.stages for op in stage]
        expected = micro_ops(t.wr_table.params.b)
        if [op for op in ops if op != DELAY] != expected:
            raise ValueError(f"stages {cfg.names} do not cover {expected} in order")
        self.cfg = cfg
        self.dp = _Datapath(t, q, in_fmt)
        self.keep_trace = keep_trace
        self.traces: list = []

    def run_raw(self, inputs: Sequence[tuple[int, int, int, int]]):
        """Stream raw ``(ar, ai, br, bi)`` tuples; returns ``[(cycle, (xr, xi, yr, yi))]``."""
        depth = self.cfg.depth
        stages = self.cfg.stages
        run = self.dp.run
        regs = [None] * depth
        out = []
        n_in = len(inputs)
        cycle = 0
        while cycle <= n_in - 1 + depth:
            # observe the output register, then clock every stage
            last = regs[-1]
            if last is not None:
                out.append((cycle, last["out"]))
                if self.keep_trace:
                    self.traces.append(last["trace"])
            for s in range(depth - 1, 0, -1):
                tok = regs[s - 1]
                if tok is not None:
                    for op in stages[s]:
                        run(op, tok)
                regs[s] = tok
            if cycle < n_in:
                ar, ai, br, bi = inputs[cycle]
                tok = {"a": (ar, ai), "b": (br, bi)}
                if self.keep_trace:
                    tok["trace"] = []
                for op in stages[0]:
                    run(op, tok)
                regs[0] = tok
            else:
                regs[0] = None
            cycle += 1
        return out


class _LaneDatapath(_Datapath):
    """The same micro-ops applied to numpy arrays, one element per lane.

    The four products are stacked on axis 0 in the order rr, ii, ri, ir.
    """

    def __init__(self, t, q, in_fmt):
        super().__init__(t, q, in_fmt)
        rr = np.array(t.wr_table.roms, dtype=np.int64)
        ri = np.array(t.wi_table.roms, dtype=np.int64)
        self.roms = np.stack([rr, ri, rr, ri])  # (4, b, 2**p)
        self.sel = np.arange(4)[:, None]

    def slice_rom(self, tok):
        br, bi = tok["b"]
        x = np.stack([br, bi, bi, br])  # operand of rr, ii, ri, ir
        mask = (1 << self.p) - 1
        tok["partials"] = tuple(
            self.roms[self.sel, k, (x >> (self.p * k)) & mask] for k in range(self.b)
        )

    def add_level(self, tok, level):
        tok["partials"] = combine_level(tok["partials"], self.p << (level - 1)).partials

    def addsub(self, tok):
        rr, ii, ri, ir = tok.pop("partials")[0]
        wb_r, wb_i = rr + ii, ri - ir
        ar, ai = (v << self.a_shift for v in tok["a"])
        tok["out"] = (ar + wb_r, ai + wb_i, ar - wb_r, ai - wb_i)

    def requant(self, tok):
        q = self.q
        if q is None:
            return
        kern = kernels.get_backend("python")
        rnd = int(q.rounding == NEAREST_EVEN)
        ovf = int(q.overflow == WRAP)
        tok["out"] = tuple(kern.requant(v, self.shift, q.out_fmt.width, rnd, ovf) for v in tok["out"])


class LaneSimulator:
    """Many independent streams clocked through identical pipelines at once.

    Lane ``l`` is fed ``streams[l, c]`` during cycle ``c`` while
    ``c < lengths[l]``; a per-lane valid bit travels with every register.
    Timing and values follow :class:`PipelineSimulator` exactly.
    """

    def __init__(self, cfg: PipelineConfig, t: TwiddleTables, q: Optional[RequantPolicy],
                 in_fmt: QFormat):
        PipelineSimulator(cfg, t, q, in_fmt)  # validates the stage list
        self.cfg = cfg
        self.dp = _LaneDatapath(t, q, in_fmt)

    def run(self, streams, lengths):
        """Returns ``(valid, values)``: bool (cycles, lanes), int64 (cycles, lanes, 4)."""
        streams = np.asarray(streams, dtype=np.int64)
        lengths = np.asarray(lengths)
        lanes, max_len = streams.shape[:2]
        depth = self.cfg.depth
        n_cycles = max_len + depth
        valid_out = np.zeros((n_cycles, lanes), dtype=bool)
        values = np.zeros((n_cycles, lanes, 4), dtype=np.int64)
        regs = [None] * depth
        for cycle in range(n_cycles):
            last = regs[-1]
            if last is not None:
                valid_out[cycle] = last["valid"]
                values[cycle] = np.stack(last["out"], axis=-1)
            for s in range(depth - 1, 0, -1):
                tok = regs[s - 1]
                if tok is not None:
                    for op in self.cfg.stages[s]:
                        self.dp.run(op, tok)
                regs[s] = tok
            if cycle < max_len:
                v = streams[:, cycle, :]
                tok = {"a": (v[:, 0], v[:, 1]), "b": (v[:, 2], v[:, 3]),
                       "valid": cycle < lengths}
                for op in self.cfg.stages[0]:
                    self.dp.run(op, tok)
                regs[0] = tok
            else:
                regs[0] = None
        return valid_out, values


def simulate_stream(cfg: PipelineConfig, t: TwiddleTables, q: Optional[RequantPolicy],
                    inputs: Sequence[tuple[ComplexFx, ComplexFx]]):
    """Cycle-stamped butterfly outputs ``[(cycle, (X, Y)), ...]``."""
    if not inputs:
        raise ValueError("empty input stream")
    in_fmt = inputs[0][0].fmt
    sim = PipelineSimulator(cfg, t, q, in_fmt)
    raw = [(a.re.raw, a.im.raw, b.re.raw, b.im.raw) for a, b in inputs]
    if q is None:
        out_fmt = QFormat(in_fmt.width + t.wr.fmt.width + 2, in_fmt.frac + t.wr.fmt.frac)
    else:
        out_fmt = q.out_fmt
    return [
        (c, (ComplexFx.from_raw(xr, xi, out_fmt), ComplexFx.from_raw(yr, yi, out_fmt)))
        for c, (xr, xi, yr, yi) in sim.run_raw(raw)
    ]


def stream_to_csv(outputs) -> str:
    lines = ["cycle,xr,xi,yr,yi\n"]
    for cycle, (x, y) in outputs:
        lines.append(f"{cycle},{x.re.raw},{x.im.raw},{y.re.raw},{y.im.raw}\n")
    return "".join(lines)


# --- structural cost model -------------------------------------------------

DEFAULT_WEIGHTS = {"rom_bit": 1, "adder_bit": 6, "register_bit": 4, "multiplier_bit2": 6}


@dataclass(frozen=True)
class CostReport:
    design: str
    rom_bits: int
    adder_count: int
    multiplier_count: int
    register_bits: int
    pipeline_depth: int
    gate_proxy: int
    weights: dict = field(default_factory=lambda: dict(DEFAULT_WEIGHTS))

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2) + "\n"


def estimate_cost(design: str, fmt: QFormat, slice: SliceParams, n_constants: int,
                  tw_width: Optional[int] = None, weights: Optional[dict] = None) -> CostReport:
    """Closed-form structural cost of one butterfly datapath.

    ``n_constants`` counts complex twiddles; each needs a real and an
    imaginary ROM bank. The conventional design is modelled as unpipelined
    (output register only) with four hardware multipliers and no ROM.
    """
    if n_constants < 0:
        raise ValueError("n_constants must be >= 0")
    w = dict(DEFAULT_WEIGHTS)
    w.update(weights or {})
    tw_width = tw_width or fmt.width
    adder_width = fmt.width + tw_width + 2
    lanes = 4 * fmt.width  # ar, ai, br, bi
    if design == "digit_slicing":
        entry_width = tw_width + slice.p
        rom_bits = 2 * n_constants * slice.b * (1 << slice.p) * entry_width
        adders = 4 * (slice.b - 1) + 6
        mults = 0
        depth = len(micro_ops(slice.b))
    elif design == "conventional":
        rom_bits = 0
        adders = 2 + 4
        mults = 4
        depth = 1
    else:
        raise ValueError(f"unknown design {design!r}")
    register_bits = depth * lanes
    gate_proxy = (
        rom_bits * w["rom_bit"]
        + adders * adder_width * w["adder_bit"]
        + register_bits * w["register_bit"]
        + mults * fmt.width * tw_width * w["multiplier_bit2"]
    )
    return CostReport(design, rom_bits, adders, mults, register_bits, depth, gate_proxy, w)
