(function () {
"use strict";
var exports = {};
var module = { exports: exports };
"use strict";
/**
 * Page agent injected by the capture bridge.
 *
 * Measures element geometry in document space, hides elements without
 * disturbing layout, disables smooth scrolling, and applies exact scroll
 * offsets on command. The bridge evaluates
 * `__s2rAgent_<suffix>.dispatch(<call JSON>)` and receives a JSON string;
 * the build wraps this module in an IIFE and installs it under a global
 * whose name the bridge substitutes, so nothing leaks into page scope.
 *
 * This file is self-contained by design: it is the only code that runs
 * inside the target page.
 */
Object.defineProperty(exports, "__esModule", { value: true });
exports.OVERLAY_POSITIONING = void 0;
exports.normalizeWhitespace = normalizeWhitespace;
exports.clampScroll = clampScroll;
exports.parseZIndex = parseZIndex;
exports.toDocumentSpace = toDocumentSpace;
exports.buildSelector = buildSelector;
exports.createAgent = createAgent;
/** Positioning kinds that float a text box above the artwork. */
exports.OVERLAY_POSITIONING = ["absolute", "fixed", "sticky"];
/** Collapse whitespace runs to single spaces and trim; DOM text carries
 * layout whitespace that must not count as narration words. */
function normalizeWhitespace(text) {
    return text.replace(/\s+/g, " ").trim();
}
/** Clamp a requested scroll offset into the document's scrollable range. */
function clampScroll(y, maxScroll) {
    return Math.max(0, Math.min(y, maxScroll));
}
function parseZIndex(raw) {
    const n = parseInt(raw ?? "", 10);
    return Number.isFinite(n) ? n : 0;
}
/** Viewport rect plus current scroll offset = document-space box. */
function toDocumentSpace(rect, scrollX, scrollY) {
    return {
        x: rect.x + scrollX,
        y: rect.y + scrollY,
        width: rect.width,
        height: rect.height,
    };
}
function compoundFor(el) {
    const tag = el.tagName.toLowerCase();
    const id = el.id ? `#${el.id}` : "";
    const classes = typeof el.className === "string" && el.className.trim()
        ? "." + el.className.trim().split(/\s+/).join(".")
        : "";
    return tag + id + classes;
}
function nthOfType(el) {
    const parent = el.parentElement;
    if (!parent)
        return 1;
    let nth = 0;
    for (let i = 0; i < parent.children.length; i++) {
        const sibling = parent.children[i];
        if (sibling.tagName === el.tagName) {
            nth += 1;
            if (sibling === el)
                return nth;
        }
    }
    return 1;
}
function sameTagSiblingCount(el) {
    const parent = el.parentElement;
    if (!parent)
        return 1;
    let count = 0;
    for (let i = 0; i < parent.children.length; i++) {
        if (parent.children[i].tagName === el.tagName)
            count += 1;
    }
    return count;
}
/**
 * Unique selector whose last compound carries the element's tag, id, and
 * classes (the extractor matches simple queries against that compound).
 * An id makes the element addressable directly; otherwise a child path
 * from the nearest id-bearing ancestor (or the root), with :nth-of-type
 * only where same-tag siblings make it ambiguous.
 */
function buildSelector(el) {
    const parts = [];
    let node = el;
    while (node) {
        let piece = compoundFor(node);
        if (node.id) {
            parts.unshift(piece);
            break;
        }
        if (sameTagSiblingCount(node) > 1) {
            piece += `:nth-of-type(${nthOfType(node)})`;
        }
        parts.unshift(piece);
        const parent = node.parentElement;
        if (!parent || node.tagName.toLowerCase() === "body")
            break;
        node = parent;
    }
    return parts.join(" > ");
}
function createAgent(win, suffix = "s2r") {
    const state = {
        prepared: false,
        styleEl: null,
        hideAttr: `data-${suffix}-hidden`,
        container: null,
    };
    const doc = win.document;
    function scroller() {
        if (state.container) {
            const c = state.container;
            return {
                maxScroll: c.scrollHeight - c.clientHeight,
                scrollY: c.scrollTop,
                scrollX: c.scrollLeft,
            };
        }
        const root = doc.documentElement;
        return {
            maxScroll: Math.max(root.scrollHeight, doc.body ? doc.body.scrollHeight : 0) - win.innerHeight,
            scrollY: win.scrollY,
            scrollX: win.scrollX,
        };
    }
    function documentHeight() {
        if (state.container)
            return state.container.scrollHeight;
        return Math.max(doc.documentElement.scrollHeight, doc.body ? doc.body.scrollHeight : 0);
    }
    function isCandidate(el) {
        const text = normalizeWhitespace(el.innerText ?? el.textContent ?? "");
        if (!text)
            return false;
        const rect = el.getBoundingClientRect();
        if (rect.width > win.innerWidth)
            return false;
        const style = win.getComputedStyle(el);
        return exports.OVERLAY_POSITIONING.indexOf(style.position) >= 0 || parseZIndex(style.zIndex) > 0;
    }
    function surveyElement(el) {
        const style = win.getComputedStyle(el);
        const rect = el.getBoundingClientRect();
        return {
            selector: buildSelector(el),
            text: normalizeWhitespace(el.innerText ?? el.textContent ?? ""),
            box: toDocumentSpace(rect, win.scrollX, win.scrollY),
            positioning: style.position || "static",
            z_layer: parseZIndex(style.zIndex),
        };
    }
    function survey(selector) {
        let matched;
        if (selector) {
            matched = Array.from(doc.querySelectorAll(selector));
        }
        else {
            matched = Array.from(doc.querySelectorAll("body *")).filter(isCandidate);
        }
        const elements = matched.map(surveyElement);
        elements.sort((a, b) => a.box.y - b.box.y || (a.selector < b.selector ? -1 : 1));
        return {
            page: win.location.href,
            viewport: {
                width_px: win.innerWidth,
                height_px: win.innerHeight,
                device_scale: win.devicePixelRatio || 1,
            },
            document_height_px: documentHeight(),
            elements,
        };
    }
    function hide(selectors) {
        if (!state.styleEl) {
            const style = doc.createElement("style");
            style.setAttribute(`data-${suffix}-style`, "");
            // visibility keeps layout: removing boxes from flow would shift
            // document offsets and invalidate every beat range.
            style.textContent = `[${state.hideAttr}] { visibility: hidden !important; }`;
            doc.head.appendChild(style);
            state.styleEl = style;
        }
        const affected = new Set();
        for (const sel of selectors) {
            for (const el of Array.from(doc.querySelectorAll(sel))) {
                el.setAttribute(state.hideAttr, "");
                affected.add(el);
            }
        }
        return { count: affected.size };
    }
    function scrollTo(y) {
        if (state.container) {
            state.container.scrollTop = y;
            return { applied: state.container.scrollTop };
        }
        win.scrollTo(0, y);
        return { applied: win.scrollY };
    }
    function prepare(params) {
        const style = doc.createElement("style");
        style.setAttribute(`data-${suffix}-prepare`, "");
        style.textContent = "html, body { scroll-behavior: auto !important; }";
        doc.head.appendChild(style);
        if (win.history && "scrollRestoration" in win.history) {
            win.history.scrollRestoration = "manual";
        }
        state.container = params.container ? doc.querySelector(params.container) : null;
        state.prepared = true;
        return { ok: true };
    }
    function dispatch(callJson) {
        let call = null;
        try {
            call = JSON.parse(callJson);
            let result;
            switch (call.method) {
                case "survey":
                    result = survey(call.params.selector ?? null);
                    break;
                case "hide":
                    result = hide(call.params.selectors ?? []);
                    break;
                case "scrollTo":
                    result = scrollTo(Number(call.params.y));
                    break;
                case "prepare":
                    result = prepare(call.params ?? {});
                    break;
                default:
                    return JSON.stringify({
                        id: call.id,
                        error: { message: `unknown method ${String(call.method)}` },
                    });
            }
            return JSON.stringify({ id: call.id, result });
        }
        catch (err) {
            return JSON.stringify({
                id: call ? call.id : -1,
                error: { message: err instanceof Error ? err.message : String(err) },
            });
        }
    }
    return { dispatch, survey, hide, scrollTo, prepare, _state: state };
}

var suffix = "__S2R_AGENT_NS__".replace(/^__|_*$/g, "").toLowerCase();
globalThis.__S2R_AGENT_NS__ = (module.exports.createAgent || exports.createAgent)(window, suffix);
})();
