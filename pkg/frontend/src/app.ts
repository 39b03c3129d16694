/**
 * Canvas studio: drag the seven pieces over an optional silhouette,
 * rotate in 45° steps, flip, snap, validate against the local service,
 * and exchange assemblies as jsonl.
 *
 * Keyboard: R rotate, F flip, arrows nudge, ctrl-Z/ctrl-Y undo/redo.
 * This module is the only one that touches the DOM; the model and the
 * snapping live in their own modules and are what the tests cover.
 */

import { FILL_COLORS, LABELS, type PieceKind } from "./pieces.js";
import { pointInRing, type Vec2 } from "./geometry.js";
import { BoardStore, getSprite, worldVertices, DEFAULT_SNAP_RADIUS } from "./board.js";
import { magneticSnap, describePairing, type SnapHint } from "./snap.js";
import { exportRawLine, importText, ImportError } from "./io.js";
import { LiveValidator, type ValidationView } from "./validate.js";

const SCALE = 90; // pixels per scene unit
const SERVICE_URL = "http://127.0.0.1:8436";

interface DragGesture {
  kind: PieceKind;
  grab: Vec2; // cursor offset from sprite position, scene units
}

class StudioApp {
  private readonly store = new BoardStore();
  private readonly validator = new LiveValidator(SERVICE_URL);
  private readonly canvas: HTMLCanvasElement;
  private readonly banner: HTMLElement;
  private readonly radiusLabel: HTMLElement;
  private drag: DragGesture | null = null;
  private hint: SnapHint | null = null;
  private lastView: ValidationView | null = null;
  private origin: Vec2 = [80, 520];

  constructor(root: HTMLElement) {
    root.innerHTML = "";
    const bar = document.createElement("div");
    bar.className = "toolbar";
    this.banner = document.createElement("div");
    this.banner.className = "banner";
    this.banner.textContent = "not validated yet";

    const importBtn = button("Import", () => this.pickImport());
    const exportBtn = button("Export", () => this.download());
    const validateBtn = button("Validate", () => void this.revalidate());
    const slider = document.createElement("input");
    slider.type = "range";
    slider.min = "0.05";
    slider.max = "0.50";
    slider.step = "0.01";
    slider.value = String(DEFAULT_SNAP_RADIUS);
    this.radiusLabel = document.createElement("span");
    this.radiusLabel.textContent = `snap ${DEFAULT_SNAP_RADIUS.toFixed(2)}`;
    slider.addEventListener("input", () => {
      const r = Number(slider.value);
      this.store.setSnapRadius(r);
      this.radiusLabel.textContent = `snap ${r.toFixed(2)}`;
    });

    bar.append(importBtn, exportBtn, validateBtn, slider, this.radiusLabel, this.banner);

    this.canvas = document.createElement("canvas");
    this.canvas.width = 1280;
    this.canvas.height = 800;
    this.canvas.tabIndex = 0;
    root.append(bar, this.canvas);

    this.canvas.addEventListener("mousedown", (e) => this.onDown(e));
    this.canvas.addEventListener("mousemove", (e) => this.onMove(e));
    window.addEventListener("mouseup", () => this.onUp());
    window.addEventListener("keydown", (e) => this.onKey(e));
    this.render();
  }

  private toScene(e: MouseEvent): Vec2 {
    const r = this.canvas.getBoundingClientRect();
    return [(e.clientX - r.left - this.origin[0]) / SCALE, (this.origin[1] - (e.clientY - r.top)) / SCALE];
  }

  private toScreen(p: Vec2): Vec2 {
    return [this.origin[0] + p[0] * SCALE, this.origin[1] - p[1] * SCALE];
  }

  private onDown(e: MouseEvent): void {
    const at = this.toScene(e);
    const hit = [...this.store.state.sprites].reverse().find((s) => pointInRing(at, worldVertices(s)));
    if (!hit) {
      this.store.select(null);
      this.render();
      return;
    }
    this.store.select(hit.kind);
    this.store.beginGesture();
    this.drag = { kind: hit.kind, grab: [at[0] - hit.position[0], at[1] - hit.position[1]] };
    this.render();
  }

  private onMove(e: MouseEvent): void {
    if (!this.drag) return;
    const at = this.toScene(e);
    this.store.dragTo(this.drag.kind, [at[0] - this.drag.grab[0], at[1] - this.drag.grab[1]], false);
    const sprite = getSprite(this.store.state, this.drag.kind);
    const others = this.store.state.sprites.filter((s) => s.kind !== this.drag!.kind);
    this.hint = magneticSnap(sprite, others, this.store.state.snapRadius);
    this.render();
  }

  private onUp(): void {
    if (!this.drag) return;
    if (this.hint) {
      this.store.dragBy(this.drag.kind, this.hint.delta, false);
    }
    this.drag = null;
    this.hint = null;
    this.render();
    void this.revalidate();
  }

  private onKey(e: KeyboardEvent): void {
    const selected = this.store.state.selection;
    if (e.ctrlKey && (e.key === "z" || e.key === "Z")) {
      e.preventDefault();
      this.store.undo();
      this.render();
      return;
    }
    if (e.ctrlKey && (e.key === "y" || e.key === "Y")) {
      e.preventDefault();
      this.store.redo();
      this.render();
      return;
    }
    if (selected === null) return;
    if (e.key === "r" || e.key === "R") {
      this.store.rotate(selected);
    } else if (e.key === "f" || e.key === "F") {
      this.store.flip(selected);
    } else if (e.key === "ArrowLeft") {
      this.store.nudge(selected, -1, 0);
    } else if (e.key === "ArrowRight") {
      this.store.nudge(selected, 1, 0);
    } else if (e.key === "ArrowUp") {
      this.store.nudge(selected, 0, 1);
    } else if (e.key === "ArrowDown") {
      this.store.nudge(selected, 0, -1);
    } else {
      return;
    }
    e.preventDefault();
    this.render();
  }

  private async revalidate(): Promise<void> {
    this.setBanner("validating...", "pending");
    const view = await this.validator.validate(this.store.state);
    if (view === null) return; // a newer pass owns the banner
    this.lastView = view;
    this.setBanner(view.message, view.status);
    this.render();
  }

  private setBanner(text: string, status: string): void {
    this.banner.textContent = text;
    this.banner.dataset.status = status;
  }

  private pickImport(): void {
    const input = document.createElement("input");
    input.type = "file";
    input.accept = ".json,.jsonl,application/json";
    input.addEventListener("change", () => {
      const file = input.files?.[0];
      if (!file) return;
      void file.text().then((text) => {
        try {
          const next = importText(text.split("\n")[0] ?? "", this.store.state);
          this.store.replace(next);
          this.setBanner("imported", "pending");
        } catch (err) {
          // Board deliberately untouched on any import failure.
          const why = err instanceof ImportError ? err.message : String(err);
          this.setBanner(`import failed: ${why}`, "fail");
        }
        this.render();
      });
    });
    input.click();
  }

  private download(): void {
    const line = exportRawLine(this.store.state);
    const blob = new Blob([line + "\n"], { type: "application/jsonl" });
    const a = document.createElement("a");
    a.href = URL.createObjectURL(blob);
    a.download = "assembly.jsonl";
    a.click();
    URL.revokeObjectURL(a.href);
  }

  private render(): void {
    const ctx = this.canvas.getContext("2d");
    if (!ctx) return;
    ctx.clearRect(0, 0, this.canvas.width, this.canvas.height);

    ctx.strokeStyle = "#e4e4e8";
    ctx.lineWidth = 1;
    const pitchPx = 0.5 * SCALE;
    for (let x = this.origin[0] % pitchPx; x < this.canvas.width; x += pitchPx) {
      ctx.beginPath();
      ctx.moveTo(x, 0);
      ctx.lineTo(x, this.canvas.height);
      ctx.stroke();
    }
    for (let y = this.origin[1] % pitchPx; y < this.canvas.height; y += pitchPx) {
      ctx.beginPath();
      ctx.moveTo(0, y);
      ctx.lineTo(this.canvas.width, y);
      ctx.stroke();
    }

    const underlay = this.store.state.underlay;
    if (underlay) {
      this.tracePath(ctx, underlay);
      ctx.fillStyle = "#d4d4da";
      ctx.fill();
    }

    const overlapping = new Set((this.lastView?.overlapPairs ?? []).flat());
    for (const s of this.store.state.sprites) {
      const ring = worldVertices(s);
      this.tracePath(ctx, ring);
      ctx.fillStyle = FILL_COLORS[s.kind];
      ctx.globalAlpha = 0.85;
      ctx.fill();
      ctx.globalAlpha = 1;
      const label = LABELS[s.kind];
      ctx.lineWidth = overlapping.has(label) ? 4 : s.kind === this.store.state.selection ? 3 : 1.5;
      ctx.strokeStyle = overlapping.has(label) ? "#c62828" : s.kind === this.store.state.selection ? "#1a237e" : "#333";
      ctx.stroke();
    }

    for (const flag of this.lastView?.flaggedVertices ?? []) {
      const sprite = this.store.state.sprites.find((s) => LABELS[s.kind] === flag.label);
      if (!sprite) continue;
      const v = worldVertices(sprite)[flag.vertex];
      if (!v) continue;
      const [sx, sy] = this.toScreen(v);
      ctx.beginPath();
      ctx.arc(sx, sy, 5, 0, 2 * Math.PI);
      ctx.fillStyle = "#c62828";
      ctx.fill();
    }

    if (this.hint) {
      const sprite = this.drag ? getSprite(this.store.state, this.drag.kind) : null;
      if (sprite) {
        const ghost = worldVertices(sprite).map((v): Vec2 => [v[0] + this.hint!.delta[0], v[1] + this.hint!.delta[1]]);
        this.tracePath(ctx, ghost);
        ctx.setLineDash([6, 4]);
        ctx.strokeStyle = "#00897b";
        ctx.lineWidth = 2;
        ctx.stroke();
        ctx.setLineDash([]);
        ctx.fillStyle = "#00897b";
        ctx.font = "12px sans-serif";
        ctx.fillText(describePairing(this.hint.pairing), 12, 16);
      }
    }
  }

  private tracePath(ctx: CanvasRenderingContext2D, ring: ReadonlyArray<Vec2>): void {
    ctx.beginPath();
    ring.forEach((p, i) => {
      const [x, y] = this.toScreen(p);
      if (i === 0) ctx.moveTo(x, y);
      else ctx.lineTo(x, y);
    });
    ctx.closePath();
  }
}

function button(text: string, onClick: () => void): HTMLButtonElement {
  const b = document.createElement("button");
  b.textContent = text;
  b.addEventListener("click", onClick);
  return b;
}

const mount = document.getElementById("studio");
if (mount) new StudioApp(mount);
