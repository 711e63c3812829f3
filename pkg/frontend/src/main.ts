// DOM wiring: queue header, radiograph viewer with window/level, verdict
// staging bar, metrics panel, offline banner. All data comes from the
// audit service; this file only renders and forwards key presses.

import { HttpAuditApi } from "./api";
import { actionForKey, stageForRegion } from "./keyboard";
import { ReviewStore, type ReviewState, type RetryStorage, type QueuedVerdict } from "./store";
import { REGIONS } from "./types";

const api = new HttpAuditApi("");

class LocalRetryStorage implements RetryStorage {
    private readonly key = "radregion-retry-queue";
    load(): QueuedVerdict[] {
        try {
            return JSON.parse(localStorage.getItem(this.key) ?? "[]") as QueuedVerdict[];
        } catch {
            return [];
        }
    }
    save(queue: QueuedVerdict[]): void {
        localStorage.setItem(this.key, JSON.stringify(queue));
    }
}

const store = new ReviewStore(api, reviewerId(), new LocalRetryStorage());

function reviewerId(): string {
    const existing = localStorage.getItem("radregion-reviewer");
    if (existing) return existing;
    const fresh = `reviewer-${Math.random().toString(36).slice(2, 8)}`;
    localStorage.setItem("radregion-reviewer", fresh);
    return fresh;
}

function el<T extends HTMLElement>(id: string): T {
    const node = document.getElementById(id);
    if (!node) throw new Error(`missing #${id}`);
    return node as T;
}

// --- image viewer with window/level -----------------------------------

let rawImage: ImageData | null = null;

async function loadImage(candidateId: string): Promise<void> {
    const img = new Image();
    img.src = api.imageUrl(candidateId);
    await img.decode().catch(() => undefined);
    const canvas = el<HTMLCanvasElement>("viewer");
    const ctx = canvas.getContext("2d");
    if (!ctx || !img.naturalWidth) {
        rawImage = null;
        return;
    }
    canvas.width = img.naturalWidth;
    canvas.height = img.naturalHeight;
    ctx.drawImage(img, 0, 0);
    rawImage = ctx.getImageData(0, 0, canvas.width, canvas.height);
    applyWindowLevel();
}

function applyWindowLevel(): void {
    if (!rawImage) return;
    const canvas = el<HTMLCanvasElement>("viewer");
    const ctx = canvas.getContext("2d");
    if (!ctx) return;
    const level = Number(el<HTMLInputElement>("level").value);   // 0..255
    const window_ = Number(el<HTMLInputElement>("window").value); // 1..255
    const out = new ImageData(
        new Uint8ClampedArray(rawImage.data), rawImage.width, rawImage.height);
    const lo = level - window_ / 2;
    const scale = 255 / window_;
    for (let i = 0; i < out.data.length; i += 4) {
        const v = Math.max(0, Math.min(255, (out.data[i] - lo) * scale));
        out.data[i] = out.data[i + 1] = out.data[i + 2] = v;
    }
    ctx.putImageData(out, 0, 0);
}

// --- rendering ----------------------------------------------------------

function pct(x: number | null | undefined): string {
    return x == null ? "–" : `${(100 * x).toFixed(1)}%`;
}

function render(state: ReviewState): void {
    el("offline-banner").hidden = !state.offline;
    el("retry-count").textContent = String(state.retryQueue.length);

    const notice = el("notice");
    notice.hidden = !state.notice;
    notice.textContent = state.notice ?? "";

    const candidate = state.queue[state.position] ?? null;
    el("queue-status").textContent = state.finished
        ? "queue complete"
        : `candidate ${state.position + 1} of ${state.queue.length}`;

    const card = el("candidate-card");
    card.hidden = !candidate;
    el("done-card").hidden = !state.finished;
    if (candidate) {
        el("candidate-id").textContent = candidate.id;
        el("archive-label").textContent = candidate.archive_label;
        el("model-label").textContent =
            `${candidate.prediction} (${pct(candidate.confidence)})`;
        const bars = el("softmax-bars");
        bars.innerHTML = "";
        for (const entry of candidate.softmax_top3) {
            const row = document.createElement("div");
            row.className = "bar-row";
            const name = document.createElement("span");
            name.textContent = entry.region;
            const bar = document.createElement("div");
            bar.className = "bar";
            bar.style.width = `${Math.round(entry.p * 100)}%`;
            const val = document.createElement("span");
            val.textContent = pct(entry.p);
            row.append(name, bar, val);
            bars.append(row);
        }
    }

    const staged = el("staged");
    staged.textContent = state.staged
        ? `staged: ${state.staged.label} — press Enter to confirm`
        : "stage a verdict: [A]rchive ok · [M]odel label · [R]elabel · [O]ut-of-domain · [U]nusable · [Z] undo";

    const m = state.metrics;
    if (m) {
        el("m-original").textContent = pct(m.original_accuracy);
        el("m-corrected").textContent = pct(m.corrected_accuracy);
        el("m-pending").textContent = String(m.pending);
        el("m-decided").textContent = String(m.decided);
        el("m-excluded").textContent = String(m.n_excluded);
        el("m-relabeled").textContent = String(m.n_relabeled);
        const tbody = el("per-class-body");
        tbody.innerHTML = "";
        for (const row of m.per_class) {
            const tr = document.createElement("tr");
            const delta = row.delta == null ? "–"
                : `${row.delta >= 0 ? "+" : ""}${(100 * row.delta).toFixed(1)}`;
            tr.innerHTML =
                `<td>${row.region}</td><td>${pct(row.original)}</td>` +
                `<td>${pct(row.corrected)}</td><td>${delta}</td>`;
            tbody.append(tr);
        }
    }
}

// --- region picker --------------------------------------------------------

function openPicker(): void {
    const picker = el<HTMLSelectElement>("region-picker");
    picker.hidden = false;
    picker.focus();
}

function closePicker(): void {
    const picker = el<HTMLSelectElement>("region-picker");
    picker.hidden = true;
    picker.blur();
}

// --- wiring ----------------------------------------------------------------

let lastCandidateId: string | null = null;

function wire(): void {
    const picker = el<HTMLSelectElement>("region-picker");
    for (const region of REGIONS) {
        const option = document.createElement("option");
        option.value = region;
        option.textContent = region;
        picker.append(option);
    }
    picker.addEventListener("change", () => {
        store.stage(stageForRegion(picker.value));
        closePicker();
    });

    el<HTMLInputElement>("level").addEventListener("input", applyWindowLevel);
    el<HTMLInputElement>("window").addEventListener("input", applyWindowLevel);

    document.addEventListener("keydown", (ev) => {
        if (ev.target instanceof HTMLSelectElement) {
            if (ev.key === "Escape") closePicker();
            return;
        }
        const action = actionForKey(ev.key, store.current());
        switch (action.kind) {
            case "stage":
                store.stage(action.choice);
                break;
            case "open-picker":
                openPicker();
                break;
            case "confirm":
                void store.confirm();
                break;
            case "undo":
                store.undo();
                break;
            case "clear":
                store.clearStaged();
                closePicker();
                break;
        }
    });

    store.subscribe((state) => {
        render(state);
        const current = state.queue[state.position] ?? null;
        if (current && current.id !== lastCandidateId) {
            lastCandidateId = current.id;
            void loadImage(current.id);
        }
    });

    window.setInterval(() => {
        void store.flushRetryQueue();
    }, 5000);
    window.setInterval(() => {
        void store.refreshMetrics();
    }, 15000);

    void store.loadQueue();
}

wire();
