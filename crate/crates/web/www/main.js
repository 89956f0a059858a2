import init, { phaseGrid, betaSweep, nonselection, presets } from "./pkg/dwt_web.js";

const $ = (id) => document.getElementById(id);
const num = (id) => Number($(id).value);

function fill(select, entries, textarea) {
  for (const name of Object.keys(entries)) select.add(new Option(name, name));
  const show = () => { textarea.value = JSON.stringify(entries[select.value]); };
  select.addEventListener("change", show);
  show();
}

function guarded(errId, fn) {
  return () => {
    $(errId).textContent = "";
    try { fn(); } catch (e) { $(errId).textContent = String(e.message ?? e); }
  };
}

// blue (w0 = 0) to red (w0 = 1)
function weightColour(w) {
  const r = Math.round(40 + 200 * w), b = Math.round(240 - 200 * w);
  return `rgb(${r},60,${b})`;
}

function drawGrid() {
  const n = Math.max(2, Math.min(200, num("grid-n")));
  const out = JSON.parse(phaseGrid($("grid-json").value, num("s-lo"), num("s-hi"), n, num("t-lo"), num("t-hi"), n));
  const c = $("grid-canvas"), g = c.getContext("2d");
  const cw = c.width / out.s.length, ch = c.height / out.t.length;
  g.clearRect(0, 0, c.width, c.height);
  out.cells.forEach((cell, idx) => {
    const i = Math.floor(idx / out.t.length), j = idx % out.t.length;
    g.fillStyle = cell.regime === "invalid" ? "#000"
      : cell.regime === "GammaZero" ? "#999" : weightColour(cell.w0);
    // s to the right, t upwards
    g.fillRect(i * cw, c.height - (j + 1) * ch, Math.ceil(cw), Math.ceil(ch));
  });
  c.onmousemove = (ev) => {
    const i = Math.floor(ev.offsetX / cw), j = Math.floor((c.height - ev.offsetY) / ch);
    const cell = out.cells[i * out.t.length + j];
    if (!cell) return;
    $("grid-hover").textContent = cell.regime === "invalid"
      ? `s=${cell.s.toFixed(3)} t=${cell.t.toFixed(3)}: ${cell.error}`
      : `s=${cell.s.toFixed(3)} t=${cell.t.toFixed(3)}: ${cell.regime}, gamma=${cell.gamma.toFixed(4)}, kappa=${cell.kappa}, w0=${cell.w0 === null ? "-" : cell.w0.toFixed(4)}`;
  };
}

function axes(g, w, h, pad, xr, yr, xlabel, ylabel) {
  g.strokeStyle = "#888";
  g.strokeRect(pad, 10, w - pad - 10, h - pad - 10);
  g.fillStyle = "#444";
  g.font = "11px sans-serif";
  g.fillText(xlabel, w / 2, h - 6);
  g.fillText(`${xr[0]}`, pad, h - pad + 14);
  g.fillText(`${xr[1]}`, w - 40, h - pad + 14);
  g.save();
  g.translate(12, h / 2);
  g.rotate(-Math.PI / 2);
  g.fillText(ylabel, 0, 0);
  g.restore();
  g.fillText(yr[1].toPrecision(3), pad - 34, 20);
  g.fillText(yr[0].toPrecision(3), pad - 34, h - pad);
}

function plotLines(canvas, xs, series, xlabel, ylabel, yr) {
  const g = canvas.getContext("2d"), w = canvas.width, h = canvas.height, pad = 40;
  g.clearRect(0, 0, w, h);
  const xr = [xs[0], xs[xs.length - 1]];
  const ys = series.flatMap((s) => s.y).filter(Number.isFinite);
  yr = yr ?? [Math.min(...ys), Math.max(...ys)];
  if (yr[0] === yr[1]) yr = [yr[0] - 1, yr[1] + 1];
  const px = (x) => pad + (x - xr[0]) / (xr[1] - xr[0] || 1) * (w - pad - 10);
  const py = (y) => h - pad - (y - yr[0]) / (yr[1] - yr[0]) * (h - pad - 10);
  axes(g, w, h, pad, xr, yr, xlabel, ylabel);
  series.forEach((s, k) => {
    g.strokeStyle = s.colour;
    g.beginPath();
    s.y.forEach((y, i) => { if (Number.isFinite(y)) (i ? g.lineTo : g.moveTo).call(g, px(xs[i]), py(y)); });
    g.stroke();
    g.fillStyle = s.colour;
    g.fillText(s.label, w - 150, 24 + 14 * k);
  });
}

function drawSweep() {
  const out = JSON.parse(betaSweep($("sweep-json").value, num("b-lo"), num("b-hi"), num("b-n")));
  const beta = out.rows.map((r) => r.beta);
  plotLines($("sweep-canvas"), beta, [
    { label: "mu[0]", colour: "#c33", y: out.rows.map((r) => r.mu0) },
    { label: "mu[1]", colour: "#33c", y: out.rows.map((r) => r.mu1) },
  ], "beta", "mass", [0, 1]);
  const p = out.profile, f = out.fits;
  const fmt = (x) => (x === null || x === undefined ? "-" : x.toFixed(4));
  $("sweep-summary").textContent = p
    ? `${p.regime}: gamma=${fmt(p.gamma)}, kappa=${p.kappa}, limit w0=${fmt(p.w0)}; ` +
      `fitted rate of lambda-1 ${fmt(f.lambda_minus_one)} (predicted ${fmt(p.rates.lambda_minus_one)}), ` +
      `of mu[0]/mu[1] ${fmt(f.mu_ratio)} (predicted ${fmt(p.rates.mu_ratio)})`
    : "no zero-temperature profile (coincidence attained by a tail)";
}

function drawNonselection() {
  const out = JSON.parse(nonselection($("nonsel-json").value));
  const t = $("nonsel-table");
  t.innerHTML = "";
  if (!out.experiment) {
    const bad = out.rules.checks.filter((c) => !c.passed);
    $("nonsel-err").textContent = "schedule rejected:\n" +
      bad.map((c) => `stage ${c.stage}: ${c.quantity} = ${c.value.toExponential(3)} (${c.bound} ${c.threshold})`).join("\n");
    return;
  }
  const stages = out.experiment.stages;
  t.insertRow().innerHTML = "<th>k</th><th>beta</th><th>mu[0]</th><th>mu[1]</th><th>favours</th>";
  for (const s of stages) {
    t.insertRow().innerHTML =
      `<td>${s.k}</td><td>${s.beta.toExponential(1)}</td><td>${s.mu0.toFixed(4)}</td>` +
      `<td>${s.mu1.toFixed(4)}</td><td>${s.follows_parity ? (s.favored === "Zero" ? "0" : "1") : "?"}</td>`;
  }
  plotLines($("nonsel-canvas"), stages.map((s) => s.k), [
    { label: "mu[0] at stage beta", colour: "#c33", y: stages.map((s) => s.mu0) },
  ], "stage k (beta grows by many orders)", "mu[0]", [0, 1]);
}

await init();
const p = JSON.parse(presets());
fill($("grid-family"), p.families, $("grid-json"));
fill($("sweep-preset"), p.potentials, $("sweep-json"));
$("nonsel-json").value = JSON.stringify(p.schedule, null, 1);
$("grid-run").onclick = guarded("grid-err", drawGrid);
$("sweep-run").onclick = guarded("sweep-err", drawSweep);
$("nonsel-run").onclick = guarded("nonsel-err", drawNonselection);
guarded("grid-err", drawGrid)();
guarded("sweep-err", drawSweep)();
guarded("nonsel-err", drawNonselection)();
