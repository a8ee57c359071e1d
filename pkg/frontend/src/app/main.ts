/** Browser shell: binds the core editing model to a real canvas and fetch.
 *
 * Everything stateful lives in the core modules (session, controller,
 * gallery); this file only translates pointer/input events into core calls
 * and repaints.  It is the one file allowed to touch the DOM.
 */

import { DEFAULT_CANVAS_SIZE } from "../core/bitmap.js";
import { fetchTransport, StudioClient, FieldError } from "../core/client.js";
import { SubmitController } from "../core/controller.js";
import { diffRequests } from "../core/compare.js";
import { PairLayer } from "../core/layer.js";
import { Session } from "../core/session.js";
import { makeStroke, StrokePoint } from "../core/strokes.js";
import { bytesToBase64 } from "../core/base64.js";

const SERVICE_URL = new URLSearchParams(location.search).get("service") ?? "http://127.0.0.1:8750";

const session = new Session(DEFAULT_CANVAS_SIZE, DEFAULT_CANVAS_SIZE);
const client = new StudioClient(SERVICE_URL, fetchTransport());
const controller = new SubmitController(session, client);

let activeLayerId: string | null = null;
let brushRadius = 2;
let eraseMode = false;

function $(id: string): HTMLElement {
  const el = document.getElementById(id);
  if (!el) throw new Error(`missing #${id}`);
  return el;
}

const canvas = $("canvas") as HTMLCanvasElement;
canvas.width = session.canvasWidth;
canvas.height = session.canvasHeight;
const ctx = canvas.getContext("2d")!;

// -- painting -----------------------------------------------------------------

function paint(): void {
  ctx.fillStyle = "#ffffff";
  ctx.fillRect(0, 0, canvas.width, canvas.height);
  for (const layer of session.layers) {
    if (!layer.visible) continue;
    ctx.fillStyle = layer.colorTag;
    const { width, data } = layer.bitmap;
    ctx.globalAlpha = layer.id === activeLayerId ? 1.0 : 0.45;
    for (let i = 0; i < data.length; i++) {
      if (data[i]) ctx.fillRect(i % width, (i / width) | 0, 1, 1);
    }
  }
  ctx.globalAlpha = 1.0;
}

// -- stroke capture -----------------------------------------------------------

let gesture: StrokePoint[] | null = null;

function canvasPoint(ev: PointerEvent): StrokePoint {
  const rect = canvas.getBoundingClientRect();
  return {
    x: ((ev.clientX - rect.left) / rect.width) * canvas.width,
    y: ((ev.clientY - rect.top) / rect.height) * canvas.height,
  };
}

canvas.addEventListener("pointerdown", (ev) => {
  if (!activeLayerId) return;
  canvas.setPointerCapture(ev.pointerId);
  gesture = [canvasPoint(ev)];
});

canvas.addEventListener("pointermove", (ev) => {
  if (!gesture) return;
  gesture.push(canvasPoint(ev));
  paint();
  // live preview of the in-progress gesture
  ctx.strokeStyle = eraseMode ? "#ffffff" : (activeLayer()?.colorTag ?? "#000");
  ctx.lineWidth = brushRadius * 2 + 1;
  ctx.lineJoin = ctx.lineCap = "round";
  ctx.beginPath();
  ctx.moveTo(gesture[0]!.x, gesture[0]!.y);
  for (const p of gesture) ctx.lineTo(p.x, p.y);
  ctx.stroke();
});

canvas.addEventListener("pointerup", () => {
  const layer = activeLayer();
  if (gesture && layer) {
    layer.applyStroke(makeStroke(gesture, brushRadius, eraseMode ? "erase" : "draw"));
  }
  gesture = null;
  paint();
  renderLayers();
});

function activeLayer(): PairLayer | undefined {
  return activeLayerId ? session.getLayer(activeLayerId) : undefined;
}

// -- layer panel ---------------------------------------------------------------

function renderLayers(): void {
  const list = $("layers");
  list.innerHTML = "";
  for (const layer of session.layers) {
    const row = document.createElement("div");
    row.className = "layer-row" + (layer.id === activeLayerId ? " active" : "");
    row.dataset.layerId = layer.id;

    const swatch = document.createElement("span");
    swatch.className = "swatch";
    swatch.style.background = layer.colorTag;
    swatch.onclick = () => {
      activeLayerId = layer.id;
      renderLayers();
      paint();
    };

    const visible = document.createElement("input");
    visible.type = "checkbox";
    visible.checked = layer.visible;
    visible.title = "include in submission";
    visible.onchange = () => {
      layer.setVisible(visible.checked);
      paint();
    };

    const text = document.createElement("input");
    text.type = "text";
    text.placeholder = "pair text (required to submit)";
    text.value = layer.text;
    text.oninput = () => layer.setText(text.value);

    const undo = button("undo", () => {
      layer.undo();
      paint();
    });
    const redo = button("redo", () => {
      layer.redo();
      paint();
    });
    const clear = button("clear", () => {
      layer.clear();
      paint();
    });
    const exportBtn = button("export", () => {
      const blob = new Blob([layer.exportPng() as unknown as BlobPart], { type: "image/png" });
      const a = document.createElement("a");
      a.href = URL.createObjectURL(blob);
      a.download = `${layer.id}.png`;
      a.click();
      URL.revokeObjectURL(a.href);
    });
    const remove = button("remove", () => {
      session.removeLayer(layer.id);
      if (activeLayerId === layer.id) activeLayerId = session.layers[0]?.id ?? null;
      renderLayers();
      paint();
    });

    const errors = document.createElement("span");
    errors.className = "field-error";
    errors.dataset.errorsFor = layer.id;

    row.append(swatch, visible, text, undo, redo, clear, exportBtn, remove, errors);
    list.append(row);
  }
  renderFieldErrors();
}

function button(label: string, onClick: () => void): HTMLButtonElement {
  const b = document.createElement("button");
  b.textContent = label;
  b.onclick = onClick;
  return b;
}

// -- inline errors and banner ----------------------------------------------------

function renderFieldErrors(): void {
  document.querySelectorAll(".field-error").forEach((el) => (el.textContent = ""));
  for (const err of controller.fieldErrors) {
    const el = errorSlot(err);
    if (el) el.textContent = err.message;
  }
  const banner = $("banner");
  if (controller.banner) {
    banner.textContent = controller.banner.message;
    banner.className = `banner ${controller.banner.kind}`;
  } else {
    banner.textContent = "";
    banner.className = "banner hidden";
  }
}

function errorSlot(err: FieldError): Element | null {
  switch (err.path.kind) {
    case "pair": {
      const layer = session.submittableLayers()[err.path.index] ?? session.layers[err.path.index];
      return layer ? document.querySelector(`[data-errors-for="${layer.id}"]`) : $("pairs-error");
    }
    case "pairs":
      return $("pairs-error");
    case "alpha":
      return $("alpha-error");
    case "steps":
      return $("steps-error");
    case "seed":
      return $("seed-error");
    case "global_text":
      return $("global-error");
  }
}

// -- gallery ---------------------------------------------------------------------

function renderGallery(): void {
  const box = $("gallery");
  box.innerHTML = "";
  for (const entry of controller.gallery.entries) {
    const card = document.createElement("figure");
    const img = document.createElement("img");
    img.src = `data:image/png;base64,${bytesToBase64(entry.imagePng)}`;
    img.width = 192;
    const caption = document.createElement("figcaption");
    caption.textContent = `run ${entry.runId.slice(0, 8)} · seed ${entry.seed ?? "?"} · α=${entry.request.alpha ?? "default"}`;
    const reEdit = button("re-edit", () => {
      const restored = controller.gallery.reEdit(entry.runId, { lockActualSeed: true });
      session.layers = restored.layers;
      session.globalText = restored.globalText;
      session.alpha = restored.alpha;
      session.steps = restored.steps;
      session.seedLock = restored.seedLock;
      activeLayerId = session.layers[0]?.id ?? null;
      syncKnobs();
      renderLayers();
      paint();
    });
    const compareWithLast = button("diff vs latest", () => {
      const latest = controller.gallery.entries[controller.gallery.entries.length - 1];
      if (!latest) return;
      const diff = diffRequests(entry.request, latest.request);
      $("compare").textContent = diff.identical
        ? "requests are identical — nothing to highlight"
        : JSON.stringify(diff, null, 2);
    });
    card.append(img, caption, reEdit, compareWithLast);
    box.append(card);
  }
}

// -- knobs -------------------------------------------------------------------------

function syncKnobs(): void {
  ($("global-text") as HTMLInputElement).value = session.globalText;
  ($("alpha") as HTMLInputElement).value = String(session.alpha ?? 1);
  ($("alpha-value") as HTMLElement).textContent = String(session.alpha ?? "default");
  ($("seed-locked") as HTMLInputElement).checked = session.seedLock.locked;
  ($("seed-value") as HTMLInputElement).value = String(session.seedLock.value);
}

function wireKnobs(): void {
  ($("global-text") as HTMLInputElement).oninput = (ev) =>
    session.setGlobalText((ev.target as HTMLInputElement).value);
  ($("alpha") as HTMLInputElement).oninput = (ev) => {
    session.setAlpha(Number((ev.target as HTMLInputElement).value));
    ($("alpha-value") as HTMLElement).textContent = String(session.alpha);
  };
  ($("seed-locked") as HTMLInputElement).onchange = (ev) => {
    const locked = (ev.target as HTMLInputElement).checked;
    if (locked) session.lockSeed(Number(($("seed-value") as HTMLInputElement).value) | 0);
    else session.unlockSeed();
  };
  ($("seed-value") as HTMLInputElement).onchange = (ev) => {
    if (session.seedLock.locked) session.lockSeed(Number((ev.target as HTMLInputElement).value) | 0);
  };
  ($("add-layer") as HTMLButtonElement).onclick = () => {
    const layer = session.addLayer();
    activeLayerId = layer.id;
    renderLayers();
    paint();
  };
  ($("submit") as HTMLButtonElement).onclick = async () => {
    const submitButton = $("submit") as HTMLButtonElement;
    submitButton.disabled = true;
    submitButton.textContent = "generating…";
    const outcome = await controller.submit();
    submitButton.disabled = false;
    submitButton.textContent = "generate";
    renderFieldErrors();
    if (outcome.ok) renderGallery();
  };
  ($("banner") as HTMLElement).onclick = () => {
    controller.clearBanner();
    renderFieldErrors();
  };
}

wireKnobs();
syncKnobs();
const first = session.addLayer();
activeLayerId = first.id;
renderLayers();
paint();

client
  .health()
  .then((h) => {
    $("status").textContent = `service ok · model ${h.model_loaded ? h.active_checkpoint ?? "loaded" : "not loaded"}`;
  })
  .catch(() => {
    $("status").textContent = `service unreachable at ${SERVICE_URL}`;
  });
