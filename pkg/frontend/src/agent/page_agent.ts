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

export interface AgentCall {
  method: "survey" | "hide" | "scrollTo" | "prepare";
  params: Record<string, unknown>;
  id: number;
}

export interface AgentResponse {
  id: number;
  result?: unknown;
  error?: { message: string };
}

export interface BoxRect {
  x: number;
  y: number;
  width: number;
  height: number;
}

export interface SurveyedElement {
  selector: string;
  text: string;
  box: BoxRect;
  positioning: string;
  z_layer: number;
}

export interface PageSurvey {
  page: string;
  viewport: { width_px: number; height_px: number; device_scale: number };
  document_height_px: number;
  elements: SurveyedElement[];
}

/** Positioning kinds that float a text box above the artwork. */
export const OVERLAY_POSITIONING = ["absolute", "fixed", "sticky"];

/** Collapse whitespace runs to single spaces and trim; DOM text carries
 * layout whitespace that must not count as narration words. */
export function normalizeWhitespace(text: string): string {
  return text.replace(/\s+/g, " ").trim();
}

/** Clamp a requested scroll offset into the document's scrollable range. */
export function clampScroll(y: number, maxScroll: number): number {
  return Math.max(0, Math.min(y, maxScroll));
}

export function parseZIndex(raw: string | null | undefined): number {
  const n = parseInt(raw ?? "", 10);
  return Number.isFinite(n) ? n : 0;
}

/** Viewport rect plus current scroll offset = document-space box. */
export function toDocumentSpace(
  rect: { x: number; y: number; width: number; height: number },
  scrollX: number,
  scrollY: number
): BoxRect {
  return {
    x: rect.x + scrollX,
    y: rect.y + scrollY,
    width: rect.width,
    height: rect.height,
  };
}

/**
 * Structural subset of Element used by the selector builder, so the pure
 * logic is testable outside a browser.
 */
export interface ElementNode {
  tagName: string;
  id: string;
  className: string;
  parentElement: ElementNode | null;
  children: ArrayLike<ElementNode>;
}

function compoundFor(el: ElementNode): string {
  const tag = el.tagName.toLowerCase();
  const id = el.id ? `#${el.id}` : "";
  const classes =
    typeof el.className === "string" && el.className.trim()
      ? "." + el.className.trim().split(/\s+/).join(".")
      : "";
  return tag + id + classes;
}

function nthOfType(el: ElementNode): number {
  const parent = el.parentElement;
  if (!parent) return 1;
  let nth = 0;
  for (let i = 0; i < parent.children.length; i++) {
    const sibling = parent.children[i];
    if (sibling.tagName === el.tagName) {
      nth += 1;
      if (sibling === el) return nth;
    }
  }
  return 1;
}

function sameTagSiblingCount(el: ElementNode): number {
  const parent = el.parentElement;
  if (!parent) return 1;
  let count = 0;
  for (let i = 0; i < parent.children.length; i++) {
    if (parent.children[i].tagName === el.tagName) count += 1;
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
export function buildSelector(el: ElementNode): string {
  const parts: string[] = [];
  let node: ElementNode | null = el;
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
    const parent: ElementNode | null = node.parentElement;
    if (!parent || node.tagName.toLowerCase() === "body") break;
    node = parent;
  }
  return parts.join(" > ");
}

interface AgentState {
  prepared: boolean;
  styleEl: HTMLStyleElement | null;
  hideAttr: string;
  container: Element | null;
}

export function createAgent(win: Window & typeof globalThis, suffix = "s2r") {
  const state: AgentState = {
    prepared: false,
    styleEl: null,
    hideAttr: `data-${suffix}-hidden`,
    container: null,
  };
  const doc = win.document;

  function scroller(): { maxScroll: number; scrollY: number; scrollX: number } {
    if (state.container) {
      const c = state.container as HTMLElement;
      return {
        maxScroll: c.scrollHeight - c.clientHeight,
        scrollY: c.scrollTop,
        scrollX: c.scrollLeft,
      };
    }
    const root = doc.documentElement;
    return {
      maxScroll:
        Math.max(root.scrollHeight, doc.body ? doc.body.scrollHeight : 0) - win.innerHeight,
      scrollY: win.scrollY,
      scrollX: win.scrollX,
    };
  }

  function documentHeight(): number {
    if (state.container) return (state.container as HTMLElement).scrollHeight;
    return Math.max(doc.documentElement.scrollHeight, doc.body ? doc.body.scrollHeight : 0);
  }

  function isCandidate(el: Element): boolean {
    const text = normalizeWhitespace((el as HTMLElement).innerText ?? el.textContent ?? "");
    if (!text) return false;
    const rect = el.getBoundingClientRect();
    if (rect.width > win.innerWidth) return false;
    const style = win.getComputedStyle(el);
    return OVERLAY_POSITIONING.indexOf(style.position) >= 0 || parseZIndex(style.zIndex) > 0;
  }

  function surveyElement(el: Element): SurveyedElement {
    const style = win.getComputedStyle(el);
    const rect = el.getBoundingClientRect();
    return {
      selector: buildSelector(el as unknown as ElementNode),
      text: normalizeWhitespace((el as HTMLElement).innerText ?? el.textContent ?? ""),
      box: toDocumentSpace(rect, win.scrollX, win.scrollY),
      positioning: style.position || "static",
      z_layer: parseZIndex(style.zIndex),
    };
  }

  function survey(selector: string | null): PageSurvey {
    let matched: Element[];
    if (selector) {
      matched = Array.from(doc.querySelectorAll(selector));
    } else {
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

  function hide(selectors: string[]): { count: number } {
    if (!state.styleEl) {
      const style = doc.createElement("style");
      style.setAttribute(`data-${suffix}-style`, "");
      // visibility keeps layout: removing boxes from flow would shift
      // document offsets and invalidate every beat range.
      style.textContent = `[${state.hideAttr}] { visibility: hidden !important; }`;
      doc.head.appendChild(style);
      state.styleEl = style;
    }
    const affected = new Set<Element>();
    for (const sel of selectors) {
      for (const el of Array.from(doc.querySelectorAll(sel))) {
        el.setAttribute(state.hideAttr, "");
        affected.add(el);
      }
    }
    return { count: affected.size };
  }

  function scrollTo(y: number): { applied: number } {
    if (state.container) {
      (state.container as HTMLElement).scrollTop = y;
      return { applied: (state.container as HTMLElement).scrollTop };
    }
    win.scrollTo(0, y);
    return { applied: win.scrollY };
  }

  function prepare(params: { container?: string }): { ok: boolean } {
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

  function dispatch(callJson: string): string {
    let call: AgentCall | null = null;
    try {
      call = JSON.parse(callJson) as AgentCall;
      let result: unknown;
      switch (call.method) {
        case "survey":
          result = survey((call.params.selector as string | null) ?? null);
          break;
        case "hide":
          result = hide((call.params.selectors as string[]) ?? []);
          break;
        case "scrollTo":
          result = scrollTo(Number(call.params.y));
          break;
        case "prepare":
          result = prepare((call.params as { container?: string }) ?? {});
          break;
        default:
          return JSON.stringify({
            id: call.id,
            error: { message: `unknown method ${String(call.method)}` },
          } satisfies AgentResponse);
      }
      return JSON.stringify({ id: call.id, result } satisfies AgentResponse);
    } catch (err) {
      return JSON.stringify({
        id: call ? call.id : -1,
        error: { message: err instanceof Error ? err.message : String(err) },
      } satisfies AgentResponse);
    }
  }

  return { dispatch, survey, hide, scrollTo, prepare, _state: state };
}
