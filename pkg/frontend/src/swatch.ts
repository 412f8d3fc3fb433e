/** Keyframe histograms rendered as horizontal color-band strips.
 *
 * Each bin becomes one band: hue walks the spectrum with bin index,
 * band width is proportional to the bin's share of total mass. A
 * storyboard is just a row of these strips, one per keyframe.
 */

export interface Band {
  hue: number;
  share: number;
}

export function histBands(hist: number[]): Band[] {
  const total = hist.reduce((acc, v) => acc + Math.max(v, 0), 0);
  const n = hist.length;
  return hist.map((v, i) => ({
    hue: Math.round((i / Math.max(n, 1)) * 360),
    share: total > 0 ? Math.max(v, 0) / total : 1 / Math.max(n, 1),
  }));
}

export function renderStrip(doc: Document, hist: number[]): HTMLElement {
  const strip = doc.createElement("div");
  strip.className = "swatch-strip";
  for (const band of histBands(hist)) {
    const el = doc.createElement("span");
    el.className = "swatch-band";
    // flex-grow carries the proportion so zero-mass bins collapse
    el.style.flexGrow = String(band.share);
    el.style.backgroundColor = `hsl(${band.hue}, 70%, 55%)`;
    strip.appendChild(el);
  }
  return strip;
}

export function renderStoryboard(doc: Document, frames: { hist: number[] }[]): HTMLElement {
  const board = doc.createElement("div");
  board.className = "storyboard";
  for (const frame of frames) {
    board.appendChild(renderStrip(doc, frame.hist));
  }
  return board;
}
