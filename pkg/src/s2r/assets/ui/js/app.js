/** Editor wiring: beat table, mode tabs, timeline chart, validated saves.
 *
 * The chart and durations always come from GET /api/timeline; the client
 * never computes pacing itself. Saving goes through PUT /api/config and is
 * disabled while the local validation mirror reports errors.
 */
import { ApiError, getConfig, getTimeline, putConfig } from "./api.js";
import { timelineGeometry } from "./chart.js";
import { estimateSeconds, fmtRange, fmtSeconds, truncate, wordCount } from "./format.js";
import { mergeWithNext } from "./merge.js";
import { MODES } from "./types.js";
import { validateConfig } from "./validate.js";
const state = {
    config: null,
    dirty: false,
    selectedBeatId: null,
    activeMode: "beats-slow",
    lastReport: null,
};
const $ = (sel) => {
    const el = document.querySelector(sel);
    if (!el)
        throw new Error(`missing element ${sel}`);
    return el;
};
function setBanner(text, kind) {
    const banner = $("#banner");
    banner.textContent = text;
    banner.className = kind;
}
function refreshValidation() {
    if (!state.config)
        return;
    state.lastReport = validateConfig(state.config);
    const save = $("#save");
    save.disabled = !state.lastReport.ok || !state.dirty;
    const list = $("#issues");
    list.innerHTML = "";
    for (const issue of state.lastReport.issues) {
        const li = document.createElement("li");
        li.className = issue.severity;
        li.textContent = `${issue.path}: ${issue.message}`;
        list.appendChild(li);
    }
}
function markDirty() {
    state.dirty = true;
    refreshValidation();
}
function renderTabs() {
    const tabs = $("#tabs");
    tabs.innerHTML = "";
    for (const mode of MODES) {
        const button = document.createElement("button");
        button.textContent = mode;
        button.className = mode === state.activeMode ? "tab active" : "tab";
        button.addEventListener("click", () => {
            state.activeMode = mode;
            renderTabs();
            void refreshTimeline();
        });
        tabs.appendChild(button);
    }
}
function beatRow(config, index) {
    const beat = config.beats[index];
    const row = document.createElement("tr");
    row.className = beat.id === state.selectedBeatId ? "selected" : "";
    row.addEventListener("click", () => {
        state.selectedBeatId = beat.id;
        renderTable();
    });
    const cells = {
        id: document.createElement("td"),
        range: document.createElement("td"),
        words: document.createElement("td"),
        est: document.createElement("td"),
        text: document.createElement("td"),
        short: document.createElement("td"),
    };
    cells.id.textContent = beat.id;
    cells.range.textContent = fmtRange(beat.y_start_px, beat.y_end_px);
    cells.words.textContent = String(wordCount(beat.text));
    const est = beat.measured_duration_s ?? estimateSeconds(beat.text, config.speaking_rate_wpm);
    cells.est.textContent = fmtSeconds(est);
    cells.est.title = beat.measured_duration_s !== null ? "measured" : "estimated";
    const text = document.createElement("textarea");
    text.value = beat.text;
    text.rows = 2;
    text.addEventListener("input", () => {
        beat.text = text.value;
        markDirty();
    });
    cells.text.appendChild(text);
    const short = document.createElement("textarea");
    short.value = beat.short_text ?? "";
    short.placeholder = "(not shortened)";
    short.rows = 2;
    short.addEventListener("input", () => {
        beat.short_text = short.value.trim() ? short.value : null;
        markDirty();
    });
    cells.short.appendChild(short);
    for (const cell of Object.values(cells))
        row.appendChild(cell);
    return row;
}
function renderTable() {
    const config = state.config;
    if (!config)
        return;
    const body = $("#beats-body");
    body.innerHTML = "";
    config.beats.forEach((_, i) => body.appendChild(beatRow(config, i)));
    $("#merge").toggleAttribute("disabled", state.selectedBeatId === null ||
        config.beats.findIndex((b) => b.id === state.selectedBeatId) >= config.beats.length - 1);
    $("#page-name").textContent = `${config.page} - ${truncate(config.mode, 20)}`;
}
function renderChart(timeline) {
    const svg = $("#chart");
    const width = svg.clientWidth || 640;
    const height = svg.clientHeight || 240;
    const geometry = timelineGeometry(timeline, width, height);
    const line = document.getElementById("chart-line");
    line.setAttribute("points", geometry.polyline);
    $("#chart-label").textContent =
        `${state.activeMode}: ${fmtSeconds(geometry.totalDuration)} total, ` +
            `${timeline.segments.length} segment${timeline.segments.length === 1 ? "" : "s"}`;
}
async function refreshTimeline() {
    try {
        renderChart(await getTimeline(state.activeMode));
        setBanner("", "");
    }
    catch (err) {
        if (err instanceof ApiError) {
            setBanner(`timeline (${state.activeMode}): ${err.message}`, "error");
        }
        else {
            setBanner("server unreachable; retry when `s2r preview` is running", "error");
        }
    }
}
async function load() {
    try {
        state.config = await getConfig();
        state.dirty = false;
        state.activeMode = state.config.mode;
        renderTabs();
        renderTable();
        refreshValidation();
        await refreshTimeline();
    }
    catch (err) {
        setBanner(err instanceof ApiError
            ? `cannot load config: ${err.message}`
            : "server unreachable; retry when `s2r preview` is running", "error");
    }
}
async function save() {
    if (!state.config)
        return;
    try {
        state.config = await putConfig(state.config);
        state.dirty = false;
        renderTable();
        refreshValidation();
        await refreshTimeline();
        setBanner("saved", "info");
    }
    catch (err) {
        if (err instanceof ApiError && err.report) {
            state.lastReport = err.report;
            const list = $("#issues");
            list.innerHTML = "";
            for (const issue of err.report.issues) {
                const li = document.createElement("li");
                li.className = issue.severity;
                li.textContent = `${issue.path}: ${issue.message}`;
                list.appendChild(li);
            }
            setBanner("save rejected by the server", "error");
        }
        else {
            setBanner(`save failed: ${err instanceof Error ? err.message : err}`, "error");
        }
    }
}
function mergeSelected() {
    if (!state.config || state.selectedBeatId === null)
        return;
    try {
        state.config = mergeWithNext(state.config, state.selectedBeatId);
        markDirty();
        renderTable();
    }
    catch (err) {
        setBanner(String(err instanceof Error ? err.message : err), "error");
    }
}
window.addEventListener("DOMContentLoaded", () => {
    $("#save").addEventListener("click", () => void save());
    $("#reload").addEventListener("click", () => void load());
    $("#merge").addEventListener("click", mergeSelected);
    void load();
});
