import init, { MomentProbe, ReducedFlow, ConvergenceCurve } from "./pkg/swtorus_demo.js";

const $ = (id) => document.getElementById(id);
const num = (id) => Number($(id).value);
const fmt = (v) => v.toExponential(6);

function probe() {
  const h = [0, 1, 2, 3].map((i) => num(`h${i}`));
  const v = [0, 1, 2, 3].map((i) => num(`v${i}`));
  const p = new MomentProbe(h, v, num("c"));
  const mu = Array.from(p.mu(), fmt).join(", ");
  const oracle = Array.from(p.oracle(), fmt).join(", ");
  $("probe").textContent =
    `μ(h)           = (${mu})\n` +
    `½ h̄ i h        = (${oracle})\n` +
    `ω(L_ζ h, v)    = ${fmt(p.symplectic())}\n` +
    `c·Re(h̄ v)      = ${fmt(p.pairing())}\n` +
    `sum            = ${p.defect().toExponential(2)}`;
  p.free();
}

// Diverging blue-white-red map for a value in [0, 1].
function color(t) {
  const s = Math.max(0, Math.min(1, t));
  const r = s < 0.5 ? 2 * s : 1;
  const b = s < 0.5 ? 1 : 2 * (1 - s);
  const g = 1 - Math.abs(2 * s - 1);
  return [255 * r, 255 * g, 255 * b];
}

function heatmap(canvas, values, n) {
  const ctx = canvas.getContext("2d");
  const img = ctx.createImageData(n, n);
  const max = Math.max(...values) || 1;
  values.forEach((v, i) => {
    // row-major in (x0, x1): x0 is the slow index
    const x0 = Math.floor(i / n), x1 = i % n;
    const [r, g, b] = color(v / max);
    const k = 4 * (x1 * n + x0);
    img.data.set([r, g, b, 255], k);
  });
  const tmp = new OffscreenCanvas(n, n);
  tmp.getContext("2d").putImageData(img, 0, 0);
  ctx.imageSmoothingEnabled = false;
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  ctx.drawImage(tmp, 0, 0, canvas.width, canvas.height);
}

// Points are [x, y] pairs already in plot coordinates.
function plot(canvas, points, label) {
  const ctx = canvas.getContext("2d");
  const { width: w, height: h } = canvas;
  ctx.clearRect(0, 0, w, h);
  if (points.length === 0) return;
  const xs = points.map((p) => p[0]), ys = points.map((p) => p[1]);
  const [x0, x1] = [Math.min(...xs), Math.max(...xs)];
  const [y0, y1] = [Math.min(...ys), Math.max(...ys)];
  const px = (x) => 30 + ((x - x0) / (x1 - x0 || 1)) * (w - 40);
  const py = (y) => h - 20 - ((y - y0) / (y1 - y0 || 1)) * (h - 40);
  ctx.strokeStyle = "#36c";
  ctx.beginPath();
  points.forEach(([x, y], i) => (i ? ctx.lineTo(px(x), py(y)) : ctx.moveTo(px(x), py(y))));
  ctx.stroke();
  ctx.fillStyle = "#36c";
  points.forEach(([x, y]) => ctx.fillRect(px(x) - 2, py(y) - 2, 4, 4));
  ctx.fillStyle = "#444";
  ctx.fillText(label, 34, 14);
  ctx.fillText(y1.toFixed(2), 2, 24);
  ctx.fillText(y0.toFixed(2), 2, h - 20);
}

let flow = null;
let running = false;

function resetFlow() {
  running = false;
  if (flow) flow.free();
  flow = new ReducedFlow(num("n"), num("seed"), num("amp"), 0.5, 0.35);
  drawFlow();
}

function drawFlow() {
  const n = flow.size();
  heatmap($("density"), Array.from(flow.spinor_density()), n);
  const e = Array.from(flow.energies());
  plot($("energy"), e.map((v, i) => [i, Math.log10(Math.max(v, 1e-300))]), "log10 E per call");
  $("flow").textContent =
    `steps ${flow.steps()}   energy ${fmt(flow.energy())}   sup residual ${fmt(flow.residual())}`;
}

function stepFlow(count) {
  flow.step(count);
  drawFlow();
}

function runFlow() {
  running = !running;
  $("run").textContent = running ? "stop" : "run";
  const tick = () => {
    if (!running) return;
    stepFlow(50);
    if (flow.residual() < 1e-8) {
      running = false;
      $("run").textContent = "run";
      return;
    }
    requestAnimationFrame(tick);
  };
  tick();
}

function measure() {
  const c = new ConvergenceCurve($("op").value, Number($("maxn").value));
  const h = Array.from(c.h()), e = Array.from(c.errors());
  plot($("conv"), h.map((v, i) => [Math.log10(v), Math.log10(e[i])]), "log10 error vs log10 h");
  $("order").textContent = `fitted order ${c.order().toFixed(3)}, nominal ${c.nominal_order()}`;
  c.free();
}

function guard(f) {
  return (...args) => {
    try {
      $("status").textContent = "";
      f(...args);
    } catch (err) {
      $("status").textContent = String(err);
    }
  };
}

await init();
$("status").textContent = "";
document.querySelectorAll("#h0,#h1,#h2,#h3,#v0,#v1,#v2,#v3,#c").forEach((el) => el.addEventListener("input", guard(probe)));
$("reset").addEventListener("click", guard(resetFlow));
$("step").addEventListener("click", guard(() => stepFlow(50)));
$("run").addEventListener("click", guard(runFlow));
$("measure").addEventListener("click", guard(measure));
guard(probe)();
guard(resetFlow)();
guard(measure)();
