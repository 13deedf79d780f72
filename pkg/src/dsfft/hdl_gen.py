"""Verilog emission for the SCML multiplier and the digit-slicing butterfly.

Everything returned here is plain text built with fixed formatting and ``\\n``
line endings, so repeated emissions are byte-identical. ROM contents go to
``$readmemh`` files, one per slice ROM.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Optional, Sequence

from .butterfly import RequantPolicy, TwiddleTables
from .fixedpoint import NEAREST_EVEN, SATURATE, QFormat
from .pipeline_sim import micro_ops
from .scml import ScmlTable, tree_depth
from .signal_io import read_hex, to_hex, write_hex

_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")


class HdlError(ValueError):
    pass


def _check_ident(name: str) -> None:
    if not _IDENT.match(name or ""):
        raise HdlError(f"invalid module name {name!r}")


def rom_hex(rom: Sequence[int], entry_width: int) -> str:
    return "".join(to_hex(v, entry_width) + "\n" for v in rom)


def parse_rom_hex(text: str, entry_width: int) -> list[int]:
    return [r[0] for r in read_hex(text, entry_width)]


def _tree_widths(entry_width: int, p: int, b: int) -> list[list[int]]:
    """Register widths of each adder-tree level (level 0 = ROM outputs)."""
    widths = [[entry_width] * b]
    shift = p
    while len(widths[-1]) > 1:
        cur, nxt = widths[-1], []
        for i in range(0, len(cur) - 1, 2):
            lo, hi = cur[i], cur[i + 1]
            nxt.append(max(lo - shift, hi) + 1 + shift)
        if len(cur) % 2:
            nxt.append(cur[-1])
        widths.append(nxt)
        shift *= 2
    return widths


def scml_latency(b: int) -> int:
    return 1 + tree_depth(b)


def _scml_module(t: ScmlTable, name: str, in_width: int, ports: int) -> str:
    p, b = t.params.p, t.params.b
    ew = t.entry_width
    out_w = t.constant.fmt.width + in_width
    widths = _tree_widths(ew, p, b)
    L = ["`default_nettype none"]
    L.append(f"// constant multiplier: raw {t.constant.raw} ({t.constant.fmt}), "
             f"{b} slices of {p} bits, latency {scml_latency(b)}")
    L.append(f"module {name} (")
    L.append("  input  wire clk,")
    port_lines = []
    for j in range(ports):
        port_lines.append(f"  input  wire signed [{in_width - 1}:0] x{j}")
        port_lines.append(f"  output wire signed [{out_w - 1}:0] y{j}")
    L.append(",\n".join(port_lines))
    L.append(");")
    for k in range(b):
        L.append(f"  reg signed [{ew - 1}:0] rom{k} [0:{(1 << p) - 1}];")
    L.append("  initial begin")
    for k in range(b):
        L.append(f'    $readmemh("{name}_rom{k}.hex", rom{k});')
    L.append("  end")
    for j in range(ports):
        L.append(f"  // port {j}, stage 1: slice and ROM lookup")
        for k in range(b):
            L.append(f"  reg signed [{ew - 1}:0] p{j}_l0_{k};")
        L.append("  always @(posedge clk) begin")
        for k in range(b):
            L.append(f"    p{j}_l0_{k} <= rom{k}[x{j}[{p * k + p - 1}:{p * k}]];")
        L.append("  end")
        shift = p
        for lv in range(1, len(widths)):
            prev, cur = widths[lv - 1], widths[lv]
            L.append(f"  // port {j}, stage {lv + 1}: adder level {lv}, "
                     f"low {shift} bits of each lower operand bypass the adder")
            for i, w in enumerate(cur):
                L.append(f"  reg signed [{w - 1}:0] p{j}_l{lv}_{i};")
                if 2 * i + 1 < len(prev):
                    lo, hi = f"p{j}_l{lv - 1}_{2 * i}", f"p{j}_l{lv - 1}_{2 * i + 1}"
                    L.append(f"  wire signed [{w - shift - 1}:0] p{j}_u{lv}_{i} = "
                             f"({lo} >>> {shift}) + {hi};")
            L.append("  always @(posedge clk) begin")
            for i in range(len(cur)):
                if 2 * i + 1 < len(prev):
                    lo = f"p{j}_l{lv - 1}_{2 * i}"
                    L.append(f"    p{j}_l{lv}_{i} <= {{p{j}_u{lv}_{i}, {lo}[{shift - 1}:0]}};")
                else:
                    L.append(f"    p{j}_l{lv}_{i} <= p{j}_l{lv - 1}_{2 * i};")
            L.append("  end")
            shift *= 2
        L.append(f"  assign y{j} = p{j}_l{len(widths) - 1}_0;")
    L.append("endmodule")
    L.append("`default_nettype wire")
    return "\n".join(L) + "\n"


def emit_scml(t: ScmlTable, module_name: str, in_width: Optional[int] = None,
              ports: int = 1) -> tuple[str, dict[str, str]]:
    """RTL for one SCML multiplier and its ROM init files ``{filename: text}``."""
    _check_ident(module_name)
    in_width = in_width or t.params.p * t.params.b
    rtl = _scml_module(t, module_name, in_width, ports)
    roms = {f"{module_name}_rom{k}.hex": rom_hex(rom, t.entry_width) for k, rom in enumerate(t.roms)}
    return rtl, roms


def _requant_expr(lines, src: str, src_w: int, q: RequantPolicy, shift: int, dst: str) -> None:
    ow = q.out_fmt.width
    qw = src_w - shift
    lines.append(f"  wire signed [{qw - 1}:0] {dst}_q = {src} >>> {shift};")
    if q.rounding == NEAREST_EVEN and shift > 0:
        sticky = f"(|{src}[{shift - 2}:0])" if shift > 1 else "1'b0"
        lines.append(f"  wire {dst}_up = {src}[{shift - 1}] & ({sticky} | {dst}_q[0]);")
        lines.append(f"  wire signed [{qw}:0] {dst}_r = {dst}_q + $signed({{1'b0, {dst}_up}});")
    else:
        lines.append(f"  wire signed [{qw}:0] {dst}_r = {dst}_q;")
    hi = (1 << (ow - 1)) - 1
    if q.overflow == SATURATE:
        lines.append(
            f"  wire signed [{ow - 1}:0] {dst}_n = ({dst}_r > {qw + 1}'sd{hi}) ? {ow}'sd{hi} :\n"
            f"      ({dst}_r < -{qw + 1}'sd{hi + 1}) ? {ow}'sh{to_hex(-hi - 1, ow)} : "
            f"{dst}_r[{ow - 1}:0];"
        )
    else:
        lines.append(f"  wire signed [{ow - 1}:0] {dst}_n = {dst}_r[{ow - 1}:0];")


def butterfly_latency(b: int) -> int:
    return len(micro_ops(b))


def emit_butterfly(t: TwiddleTables, q: RequantPolicy, module_name: str,
                   in_fmt: Optional[QFormat] = None) -> tuple[str, dict[str, str]]:
    """Top-level butterfly plus two dual-port SCML modules (``_wr``, ``_wi``).

    Latency equals :func:`dsfft.pipeline_sim.PipelineConfig.default` depth:
    SCML lookup and adder tree, one add/sub register, one requant register.
    """
    _check_ident(module_name)
    params = t.wr_table.params
    in_fmt = in_fmt or QFormat(params.p * params.b, params.p * params.b - 1)
    w = in_fmt.width
    tw = t.wr.fmt
    prod_w = w + tw.width
    full_w = prod_w + 2
    shift = in_fmt.frac + tw.frac + q.extra_shift - q.out_fmt.frac
    ow = q.out_fmt.width
    lat = scml_latency(params.b)

    rtl_r, roms_r = emit_scml(t.wr_table, f"{module_name}_wr", w, ports=2)
    rtl_i, roms_i = emit_scml(t.wi_table, f"{module_name}_wi", w, ports=2)

    L = ["`default_nettype none"]
    L.append(f"// radix-2 DIT butterfly X = A + W*B, Y = A - W*B with W = wr - j*wi")
    L.append(f"// wr raw {t.wr.raw}, wi raw {t.wi.raw} ({tw}); inputs {in_fmt}, outputs "
             f"{q.out_fmt}; {q.rounding}/{q.overflow}, stage shift {q.stage_shift}")
    L.append(f"// latency {butterfly_latency(params.b)} cycles, one input per cycle")
    L.append(f"module {module_name} (")
    L.append("  input  wire clk,")
    L.append(",\n".join(
        [f"  input  wire signed [{w - 1}:0] {n}" for n in ("ar", "ai", "br", "bi")]
        + [f"  output reg  signed [{ow - 1}:0] {n}" for n in ("xr", "xi", "yr", "yi")]
    ))
    L.append(");")
    L.append(f"  wire signed [{prod_w - 1}:0] p_rr, p_ri, p_ii, p_ir;")
    L.append(f"  {module_name}_wr u_wr (.clk(clk), .x0(br), .y0(p_rr), .x1(bi), .y1(p_ri));")
    L.append(f"  {module_name}_wi u_wi (.clk(clk), .x0(bi), .y0(p_ii), .x1(br), .y1(p_ir));")
    L.append(f"  // A waits {lat} cycles for the products")
    for s in range(lat):
        L.append(f"  reg signed [{w - 1}:0] ar_d{s}, ai_d{s};")
    L.append("  always @(posedge clk) begin")
    L.append("    ar_d0 <= ar;")
    L.append("    ai_d0 <= ai;")
    for s in range(1, lat):
        L.append(f"    ar_d{s} <= ar_d{s - 1};")
        L.append(f"    ai_d{s} <= ai_d{s - 1};")
    L.append("  end")
    L.append(f"  wire signed [{prod_w}:0] wb_r = p_rr + p_ii;")
    L.append(f"  wire signed [{prod_w}:0] wb_i = p_ri - p_ir;")
    L.append(f"  wire signed [{w + tw.frac - 1}:0] ar_al = $signed({{ar_d{lat - 1}, {tw.frac}'d0}});")
    L.append(f"  wire signed [{w + tw.frac - 1}:0] ai_al = $signed({{ai_d{lat - 1}, {tw.frac}'d0}});")
    L.append(f"  reg signed [{full_w - 1}:0] xr_f, xi_f, yr_f, yi_f;")
    L.append("  always @(posedge clk) begin")
    L.append("    xr_f <= ar_al + wb_r;")
    L.append("    xi_f <= ai_al + wb_i;")
    L.append("    yr_f <= ar_al - wb_r;")
    L.append("    yi_f <= ai_al - wb_i;")
    L.append("  end")
    L.append(f"  // requant: drop {shift} bits, then {q.overflow}")
    for n in ("xr", "xi", "yr", "yi"):
        _requant_expr(L, f"{n}_f", full_w, q, shift, n)
    L.append("  always @(posedge clk) begin")
    for n in ("xr", "xi", "yr", "yi"):
        L.append(f"    {n} <= {n}_n;")
    L.append("  end")
    L.append("endmodule")
    L.append("`default_nettype wire")
    top = "\n".join(L) + "\n"
    roms = dict(roms_r)
    roms.update(roms_i)
    return top + "\n" + rtl_r + "\n" + rtl_i, roms


# --- testbench and golden vectors ---------------------------------------

@dataclass(frozen=True)
class VectorLayout:
    """Port names, word widths and latency of the device under test."""

    in_ports: tuple[str, ...]
    out_ports: tuple[str, ...]
    in_width: int
    out_width: int
    depth: int


def scml_layout(t: ScmlTable, in_width: Optional[int] = None) -> VectorLayout:
    in_width = in_width or t.params.p * t.params.b
    return VectorLayout(("x0",), ("y0",), in_width, in_width + t.constant.fmt.width,
                        scml_latency(t.params.b))


def butterfly_layout(t: TwiddleTables, q: RequantPolicy,
                     in_fmt: Optional[QFormat] = None) -> VectorLayout:
    params = t.wr_table.params
    w = in_fmt.width if in_fmt else params.p * params.b
    return VectorLayout(("ar", "ai", "br", "bi"), ("xr", "xi", "yr", "yi"), w,
                        q.out_fmt.width, butterfly_latency(params.b))


def emit_testbench(module_name: str, vectors, layout: VectorLayout) -> tuple[str, dict[str, str]]:
    """Self-checking testbench plus ``_input.hex``/``_golden.hex`` vector files.

    ``vectors`` is a sequence of ``(inputs, expected)`` raw-integer tuples in
    port order. One vector is driven per cycle and checked ``depth`` cycles later.
    """
    _check_ident(module_name)
    vectors = list(vectors)
    if not vectors:
        raise HdlError("no test vectors")
    ni, no = len(layout.in_ports), len(layout.out_ports)
    for ins, outs in vectors:
        if len(ins) != ni or len(outs) != no:
            raise HdlError("vector arity does not match the port layout")
    n = len(vectors)
    iw, ow, depth = layout.in_width, layout.out_width, layout.depth
    inp = f"{module_name}_input.hex"
    gold = f"{module_name}_golden.hex"
    L = ["`timescale 1ns/1ps", "`default_nettype none"]
    L.append(f"module {module_name}_tb;")
    L.append(f"  localparam N = {n};")
    L.append(f"  localparam DEPTH = {depth};")
    L.append("  reg clk = 1'b0;")
    L.append("  always #5 clk = ~clk;")
    L.append(f"  reg [{iw - 1}:0] in_mem [0:{n * ni - 1}];")
    L.append(f"  reg [{ow - 1}:0] gold_mem [0:{n * no - 1}];")
    for pname in layout.in_ports:
        L.append(f"  reg  signed [{iw - 1}:0] {pname} = {iw}'sd0;")
    for pname in layout.out_ports:
        L.append(f"  wire signed [{ow - 1}:0] {pname};")
    conns = ", ".join(f".{pn}({pn})" for pn in ("clk", *layout.in_ports, *layout.out_ports))
    L.append(f"  {module_name} dut ({conns});")
    L.append("  integer i, j, errors, passed;")
    L.append("  initial begin")
    L.append("    errors = 0;")
    L.append("    passed = 0;")
    L.append(f'    $readmemh("{inp}", in_mem);')
    L.append(f'    $readmemh("{gold}", gold_mem);')
    L.append("    for (i = 0; i < N + DEPTH - 1; i = i + 1) begin")
    L.append("      if (i < N) begin")
    for k, pname in enumerate(layout.in_ports):
        L.append(f"        {pname} = in_mem[i*{ni}+{k}];")
    L.append("      end")
    L.append("      @(posedge clk);")
    L.append("      #1;")
    L.append("      j = i - (DEPTH - 1);")
    L.append("      if (j >= 0) begin")
    cond = " || ".join(f"({pn} !== $signed(gold_mem[j*{no}+{k}]))" for k, pn in enumerate(layout.out_ports))
    L.append(f"        if ({cond}) begin")
    L.append('          errors = errors + 1;')
    L.append('          $display("MISMATCH vector %0d", j);')
    L.append("        end else begin")
    L.append("          passed = passed + 1;")
    L.append("        end")
    L.append("      end")
    L.append("    end")
    L.append('    $display("PASS %0d FAIL %0d", passed, errors);')
    L.append("    $finish;")
    L.append("  end")
    L.append("endmodule")
    L.append("`default_nettype wire")
    files = {
        inp: write_hex((v[0] for v in vectors), iw),
        gold: write_hex((v[1] for v in vectors), ow),
    }
    return "\n".join(L) + "\n", files


def replay_testbench(layout: VectorLayout, input_text: str, golden_text: str,
                     dut: Callable[[list], list]) -> tuple[int, int]:
    """Run the testbench's checking procedure against a Python model.

    ``dut`` takes the list of input tuples and returns ``[(cycle, outputs)]``;
    vector ``j`` is expected at cycle ``depth + j``. Returns (passed, failed).
    """
    ins = read_hex(input_text, layout.in_width)
    gold = read_hex(golden_text, layout.out_width)
    if len(ins) != len(gold):
        raise HdlError("input and golden files differ in length")
    by_cycle = dict(dut(ins))
    passed = failed = 0
    for j, expect in enumerate(gold):
        got = by_cycle.get(layout.depth + j)
        if got is not None and tuple(got) == tuple(expect):
            passed += 1
        else:
            failed += 1
    return passed, failed


_PORT = re.compile(r"(input|output)\s+(?:wire|reg)?\s*(?:signed\s*)?\[(\d+):0\]\s*(\w+)")


def parse_ports(rtl: str, module_name: str) -> dict[str, tuple[str, int]]:
    """``{port: (direction, width)}`` from the header of ``module_name``."""
    m = re.search(rf"module\s+{re.escape(module_name)}\s*\((.*?)\);", rtl, re.S)
    if not m:
        raise HdlError(f"module {module_name} not found")
    return {name: (d, int(msb) + 1) for d, msb, name in _PORT.findall(m.group(1))}


def write_tree(outdir, files: dict[str, str]) -> list[Path]:
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    written = []
    for name in sorted(files):
        path = outdir / name
        with open(path, "w", newline="\n") as fh:
            fh.write(files[name])
        written.append(path)
    return written
