import init, { lambdaProfile, radialSolution, counterexample } from "./pkg/yamabe_web.js";

const $ = (id) => document.getElementById(id);

function fail(el, e) {
  el.innerHTML = "";
  const p = document.createElement("p");
  p.className = "err";
  p.textContent = String(e.message ?? e);
  el.replaceChildren(p);
}

// Line plot with optional horizontal reference lines.
function plot(canvas, series, { refs = [], logY = false, xLabel = "", yLabel = "" } = {}) {
  const g = canvas.getContext("2d");
  const W = canvas.width, H = canvas.height, pad = 48;
  g.clearRect(0, 0, W, H);
  const ty = (y) => (logY ? Math.log10(Math.max(y, 1e-300)) : y);
  const xs = series.flatMap((s) => s.x);
  const ys = series.flatMap((s) => s.y.map(ty)).concat(refs.map((r) => ty(r.y)));
  const finite = ys.filter(Number.isFinite);
  let [x0, x1] = [Math.min(...xs), Math.max(...xs)];
  let [y0, y1] = [Math.min(...finite), Math.max(...finite)];
  if (y1 - y0 < 1e-12) { y0 -= 1; y1 += 1; }
  const m = 0.05 * (y1 - y0);
  y0 -= m; y1 += m;
  const px = (x) => pad + ((x - x0) / (x1 - x0 || 1)) * (W - 2 * pad);
  const py = (y) => H - pad + (-(ty(y) - y0) / (y1 - y0)) * (H - 2 * pad);
  g.strokeStyle = "#999";
  g.strokeRect(pad, pad, W - 2 * pad, H - 2 * pad);
  g.fillStyle = "#444";
  g.font = "12px system-ui";
  g.fillText(xLabel, W / 2, H - 12);
  g.fillText(yLabel, 6, pad - 12);
  for (const t of [x0, (x0 + x1) / 2, x1]) g.fillText(t.toPrecision(3), px(t) - 12, H - pad + 16);
  for (const t of [y0, (y0 + y1) / 2, y1]) {
    g.fillText(logY ? "1e" + t.toFixed(1) : t.toPrecision(4), 2, H - pad - ((t - y0) / (y1 - y0)) * (H - 2 * pad) + 4);
  }
  for (const r of refs) {
    g.strokeStyle = r.color;
    g.setLineDash([5, 4]);
    g.beginPath();
    g.moveTo(pad, py(r.y));
    g.lineTo(W - pad, py(r.y));
    g.stroke();
    g.fillStyle = r.color;
    g.fillText(r.label, W - pad - 120, py(r.y) - 4);
  }
  g.setLineDash([]);
  for (const s of series) {
    g.strokeStyle = s.color;
    g.fillStyle = s.color;
    g.beginPath();
    s.x.forEach((x, i) => {
      const y = py(s.y[i]);
      if (!Number.isFinite(y)) return;
      i === 0 ? g.moveTo(px(x), y) : g.lineTo(px(x), y);
    });
    g.stroke();
    if (s.dots) s.x.forEach((x, i) => g.fillRect(px(x) - 2, py(s.y[i]) - 2, 4, 4));
  }
}

function showProfile() {
  const n = Number($("pn").value);
  $("pn-out").textContent = n;
  try {
    const p = JSON.parse(lambdaProfile(n));
    const refs = [{ y: p.sphere_value, label: "mu(S^n)", color: "#2a7" }];
    if (p.lambda_hp2) refs.push({ y: Number(p.lambda_hp2), label: "lambda_n", color: "#c52" });
    plot($("profile"), [{ x: p.bounds.map((b) => b.k), y: p.bounds.map((b) => b.value), color: "#246", dots: true }],
      { refs, xLabel: "k", yLabel: "Lambda_{n,k}" });
    $("profile-text").textContent =
      `mu(S^${n})         = ${p.sphere}\n` +
      `Lambda_{${n},>=2}  = ${p.min}  at k in {${p.argmin.join(", ")}}\n` +
      (p.lambda_hp2 ? `lambda_${n}        = ${p.lambda_hp2}\n` : "");
  } catch (e) {
    fail($("profile-text"), e);
  }
}

function showRadial() {
  const out = $("radial-text");
  out.textContent = "solving…";
  const u0 = $("ru").value === "" ? 0 : Number($("ru").value);
  setTimeout(() => {
    try {
      const s = JSON.parse(radialSolution(Number($("rn").value), Number($("rk").value), Number($("rc").value), u0));
      const t = s.trajectory;
      const positive = t.u.map((u) => Math.abs(u));
      plot($("radial-u"), [{ x: t.r, y: positive, color: "#246" }], { logY: true, xLabel: "r", yLabel: "|u|" });
      plot($("radial-tau"), [{ x: t.r, y: t.tau.map((v) => Math.max(-3 * s.sqrt_alpha - 1, Math.min(3 * s.sqrt_alpha + 1, v))), color: "#624" }],
        { refs: [{ y: -s.sqrt_alpha, label: "-sqrt(alpha_c)", color: "#2a7" }], xLabel: "r", yLabel: "tau" });
      const v = s.verdict;
      out.textContent =
        `u(0) = ${s.u0}${s.shot ? " (shooting)" : ""}\n` +
        `classification: ${s.classification}\n` +
        `tau_inf = ${v.tau_inf ?? "-"}   sqrt(alpha_c) = ${s.sqrt_alpha}\n` +
        `L2 finite: ${v.l2_finite ?? "-"}   functional ratio: ${v.functional_ratio ?? "-"}\n` +
        `theorem applies: ${v.theorem_applies}   confirmed: ${v.theorem_confirmed ?? "-"}\n` +
        v.notes.map((n) => "note: " + n + "\n").join("");
    } catch (e) {
      fail(out, e);
    }
  }, 10);
}

function showCounterexample() {
  const box = $("cx");
  try {
    const r = JSON.parse(counterexample(Number($("cn").value), $("cp").checked));
    const rows = [["Green's function", r.green], ["H", r.h], ["f", r.f], ["u = H/f", r.u]]
      .map(([name, g]) => `<tr><td>${name}</td><td>${g.a}</td><td>${g.codim}</td></tr>`).join("");
    box.innerHTML =
      `<table><tr><th>germ</th><th>exponent</th><th>codim</th></tr>${rows}</table>` +
      `<p>p<sub>n</sub> = ${r.p_n}; u &isin; L<sup>p<sub>n</sub></sup>: <b>${r.verdict_lpn}</b>; ` +
      `u &isin; L<sup>2</sup>: <b>${r.verdict_l2}</b>${r.discrepancy_flag ? " (contradicts the non-integrability claim)" : ""}</p>`;
  } catch (e) {
    fail(box, e);
  }
}

await init();
$("status").textContent = "";
$("pn").addEventListener("input", showProfile);
$("rgo").addEventListener("click", showRadial);
for (const id of ["cn", "cp"]) $(id).addEventListener("input", showCounterexample);
showProfile();
showRadial();
showCounterexample();
