import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dsfft.butterfly import ComplexFx, RequantPolicy, butterfly_ds, make_twiddle_tables
from dsfft.digit_slicing import SliceParams
from dsfft.fft_core import quantize_twiddle
from dsfft.fixedpoint import FxWord, QFormat
from dsfft.kernels import butterfly_batch
from dsfft.pipeline_sim import (
    ADDSUB,
    DELAY,
    REQUANT,
    SLICE_ROM,
    LaneSimulator,
    PipelineConfig,
    PipelineSimulator,
    estimate_cost,
    micro_ops,
    partial_add,
    simulate_stream,
    stream_to_csv,
)
from dsfft.scml import scml_mul_staged

from conftest import P4B2, P4B4, Q8, Q16

Q = RequantPolicy(Q16)


def tables(k=5, n=64, fmt=Q16, params=P4B4):
    return make_twiddle_tables(*quantize_twiddle(k, n, fmt), params)


def rand_inputs(rng, count, fmt=Q16):
    return [tuple(r) for r in rng.integers(fmt.min_raw, fmt.max_raw + 1, (count, 4)).tolist()]


def expected(tt, q, raws, fmt=Q16):
    out = []
    for ar, ai, br, bi in raws:
        x, y = butterfly_ds(ComplexFx.from_raw(ar, ai, fmt), ComplexFx.from_raw(br, bi, fmt), tt, q)
        out.append((*x.raw, *y.raw))
    return out


def test_micro_ops():
    assert micro_ops(4) == [SLICE_ROM, partial_add(1), partial_add(2), ADDSUB, REQUANT]
    assert micro_ops(2) == [SLICE_ROM, partial_add(1), ADDSUB, REQUANT]
    assert micro_ops(1) == [SLICE_ROM, ADDSUB, REQUANT]
    assert len(micro_ops(5)) == 6


def test_with_depth_covers_ops_in_order():
    for b in (2, 4, 8):
        ops = micro_ops(b)
        for depth in range(1, 12):
            cfg = PipelineConfig.with_depth(depth, b)
            assert cfg.depth == depth
            flat = [op for stage in cfg.stages for op in stage]
            assert [op for op in flat if op != DELAY] == ops
    assert PipelineConfig.with_depth(len(micro_ops(4))) == PipelineConfig.default(4)
    assert PipelineConfig.with_depth(1).names == ["+".join(micro_ops(4))]
    with pytest.raises(ValueError):
        PipelineConfig.with_depth(0)
    with pytest.raises(ValueError):
        PipelineConfig(())


def test_simulator_rejects_bad_stage_order():
    tt = tables()
    bad = PipelineConfig(((ADDSUB,), (SLICE_ROM,), (partial_add(1),), (partial_add(2),), (REQUANT,)))
    with pytest.raises(ValueError):
        PipelineSimulator(bad, tt, Q, Q16)
    with pytest.raises(ValueError):
        PipelineSimulator(PipelineConfig.default(2), tt, Q, Q16)


@pytest.mark.parametrize("depth", [1, 2, 3, 5, 8])
def test_latency_and_throughput(rng, depth):
    tt = tables()
    raws = rand_inputs(rng, 37)
    out = PipelineSimulator(PipelineConfig.with_depth(depth), tt, Q, Q16).run_raw(raws)
    assert [c for c, _ in out] == [depth + i for i in range(37)]
    assert [v for _, v in out] == expected(tt, Q, raws)


def test_single_input_and_empty_stream(rng):
    tt = tables()
    sim = PipelineSimulator(PipelineConfig.default(), tt, Q, Q16)
    assert sim.run_raw([]) == []
    raws = rand_inputs(rng, 1)
    assert sim.run_raw(raws) == [(5, expected(tt, Q, raws)[0])]
    with pytest.raises(ValueError):
        simulate_stream(PipelineConfig.default(), tt, Q, [])


def test_unquantized_outputs(rng):
    tt = tables()
    raws = rand_inputs(rng, 20)
    out = PipelineSimulator(PipelineConfig.default(), tt, None, Q16).run_raw(raws)
    assert [v for _, v in out] == expected(tt, None, raws)


def test_simulate_stream_objects(rng):
    tt = tables(k=11)
    raws = rand_inputs(rng, 10)
    pairs = [(ComplexFx.from_raw(ar, ai, Q16), ComplexFx.from_raw(br, bi, Q16)) for ar, ai, br, bi in raws]
    out = simulate_stream(PipelineConfig.default(), tt, Q, pairs)
    for i, (cycle, (x, y)) in enumerate(out):
        assert cycle == 5 + i
        assert (x, y) == butterfly_ds(*pairs[i], tt, Q)
    full = simulate_stream(PipelineConfig.default(), tt, None, pairs)
    assert full[0][1] == butterfly_ds(*pairs[0], tt, None)


def test_traces_match_staged_scml(rng):
    tt = tables(k=9)
    raws = rand_inputs(rng, 25)
    sim = PipelineSimulator(PipelineConfig.default(), tt, Q, Q16, keep_trace=True)
    sim.run_raw(raws)
    assert len(sim.traces) == 25
    for (ar, ai, br, bi), trace in zip(raws, sim.traces):
        _, ref = scml_mul_staged(tt.wr_table, FxWord(br, Q16))
        assert trace[0]["rr"] == ref.lookups
        assert [lv["rr"] for lv in trace[1:]] == [lv.partials for lv in ref.levels]
        _, ref_ir = scml_mul_staged(tt.wi_table, FxWord(br, Q16))
        assert trace[-1]["ir"] == ref_ir.levels[-1].partials


@pytest.mark.parametrize("depth", [1, 4, 5, 7])
def test_lane_simulator_matches_scalar(rng, depth):
    tt = tables(k=3)
    cfg = PipelineConfig.with_depth(depth)
    lengths = np.array([1, 5, 17, 30])
    streams = rng.integers(-2**15, 2**15, (4, 30, 4))
    valid, values = LaneSimulator(cfg, tt, Q, Q16).run(streams, lengths)
    for lane, n in enumerate(lengths):
        ref = PipelineSimulator(cfg, tt, Q, Q16).run_raw([tuple(r) for r in streams[lane, :n].tolist()])
        cycles = np.flatnonzero(valid[:, lane])
        assert cycles.tolist() == [c for c, _ in ref]
        assert [tuple(v) for v in values[cycles, lane].tolist()] == [v for _, v in ref]


def test_lane_simulator_matches_batch_kernel(rng):
    tt = tables(k=13)
    streams = rng.integers(-2**15, 2**15, (8, 64, 4))
    valid, values = LaneSimulator(PipelineConfig.default(), tt, Q, Q16).run(streams, np.full(8, 64))
    s = streams.reshape(-1, 4)
    xr, xi, yr, yi = butterfly_batch(s[:, 0], s[:, 1], s[:, 2], s[:, 3], [tt], Q16, Q, True)
    got = values[5:5 + 64].transpose(1, 0, 2).reshape(-1, 4)
    assert np.array_equal(got, np.stack([xr, xi, yr, yi], axis=1))
    assert valid[5:69].all() and not valid[:5].any()


def test_small_format_pipeline(rng):
    tt = tables(k=2, n=16, fmt=Q8, params=P4B2)
    q = RequantPolicy(Q8, "nearest-even", "wrap", "half")
    raws = rand_inputs(rng, 40, Q8)
    out = PipelineSimulator(PipelineConfig.default(2), tt, q, Q8).run_raw(raws)
    assert [c for c, _ in out] == [4 + i for i in range(40)]
    assert [v for _, v in out] == expected(tt, q, raws, Q8)


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 8), st.integers(1, 40), st.integers(0, 2**31))
def test_pipeline_laws_property(depth, length, seed):
    rng = np.random.default_rng(seed)
    tt = tables(k=int(rng.integers(32)))
    raws = rand_inputs(rng, length)
    out = PipelineSimulator(PipelineConfig.with_depth(depth), tt, Q, Q16).run_raw(raws)
    assert out[0][0] == depth
    assert all(b[0] - a[0] == 1 for a, b in zip(out, out[1:]))
    assert [v for _, v in out] == expected(tt, Q, raws)


def test_stream_csv(rng):
    tt = tables()
    pairs = [(ComplexFx.from_raw(1, 2, Q16), ComplexFx.from_raw(3, 4, Q16))]
    text = stream_to_csv(simulate_stream(PipelineConfig.default(), tt, Q, pairs))
    lines = text.splitlines()
    assert lines[0] == "cycle,xr,xi,yr,yi"
    assert lines[1].startswith("5,")
    assert len(lines) == 2


# --- cost model -------------------------------------------------------------

def test_cost_rom_bits_law():
    for p, b, width in [(4, 4, 16), (4, 2, 8), (3, 4, 12), (8, 2, 16)]:
        fmt = QFormat(width, width - 1)
        params = SliceParams(p, b)
        for n_const in (0, 1, 7, 32):
            r = estimate_cost("digit_slicing", fmt, params, n_const)
            entry_width = width + p
            assert r.rom_bits == 2 * n_const * b * (1 << p) * entry_width


def test_cost_single_constant_values():
    r = estimate_cost("digit_slicing", Q16, P4B4, 1)
    assert r.rom_bits == 2560 and r.multiplier_count == 0 and r.pipeline_depth == 5
    assert r.gate_proxy == 7512
    c = estimate_cost("conventional", Q16, P4B4, 1)
    assert c.rom_bits == 0 and c.multiplier_count == 4 and c.gate_proxy == 7624


def test_cost_direction():
    for n_const in (1, 8, 32):
        ds = estimate_cost("digit_slicing", Q16, P4B4, n_const)
        conv = estimate_cost("conventional", Q16, P4B4, n_const)
        assert ds.multiplier_count == 0 < conv.multiplier_count == 4
        assert ds.rom_bits > conv.rom_bits == 0
        assert ds.register_bits > conv.register_bits
        assert ds.adder_count > conv.adder_count


def test_cost_deterministic_and_json():
    a = estimate_cost("digit_slicing", Q16, P4B4, 32)
    b = estimate_cost("digit_slicing", Q16, P4B4, 32)
    assert a == b and a.to_json() == b.to_json()
    data = json.loads(a.to_json())
    assert data["design"] == "digit_slicing" and data["rom_bits"] == 32 * 2560
    assert data["weights"] == {"rom_bit": 1, "adder_bit": 6, "register_bit": 4, "multiplier_bit2": 6}


def test_cost_zero_constants_and_errors():
    assert estimate_cost("digit_slicing", Q16, P4B4, 0).rom_bits == 0
    with pytest.raises(ValueError):
        estimate_cost("digit_slicing", Q16, P4B4, -1)
    with pytest.raises(ValueError):
        estimate_cost("systolic", Q16, P4B4, 1)
    heavy = estimate_cost("digit_slicing", Q16, P4B4, 1, weights={"rom_bit": 10})
    assert heavy.gate_proxy == 7512 + 9 * 2560
