// Webcam frame to base64 binary PGM (P5), downsampled to at most 640x480.

export const MAX_WIDTH = 640;
export const MAX_HEIGHT = 480;

/** Output geometry: scaled down to fit 640x480, never scaled up. */
export function fitDimensions(width: number, height: number): { width: number; height: number } {
  if (width <= 0 || height <= 0) throw new RangeError("empty frame");
  const scale = Math.min(1, MAX_WIDTH / width, MAX_HEIGHT / height);
  return {
    width: Math.max(1, Math.floor(width * scale)),
    height: Math.max(1, Math.floor(height * scale)),
  };
}

/** ITU-R BT.601 luma, rounded to the nearest integer. */
export function luma(r: number, g: number, b: number): number {
  return Math.min(255, Math.round(0.299 * r + 0.587 * g + 0.114 * b));
}

/** RGBA byte buffer to a binary PGM file. */
export function rgbaToPgm(rgba: Uint8Array, width: number, height: number): Uint8Array {
  if (rgba.length !== width * height * 4) {
    throw new RangeError(`expected ${width * height * 4} RGBA bytes, got ${rgba.length}`);
  }
  const header = `P5\n${width} ${height}\n255\n`;
  const out = new Uint8Array(header.length + width * height);
  for (let i = 0; i < header.length; i++) out[i] = header.charCodeAt(i);
  for (let p = 0; p < width * height; p++) {
    out[header.length + p] = luma(rgba[4 * p], rgba[4 * p + 1], rgba[4 * p + 2]);
  }
  return out;
}

/** Base64 without Buffer so the same code runs in the browser and tests. */
export function toBase64(bytes: Uint8Array): string {
  const alphabet = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
  let out = "";
  for (let i = 0; i < bytes.length; i += 3) {
    const a = bytes[i];
    const b = i + 1 < bytes.length ? bytes[i + 1] : 0;
    const c = i + 2 < bytes.length ? bytes[i + 2] : 0;
    out += alphabet[a >> 2];
    out += alphabet[((a & 3) << 4) | (b >> 4)];
    out += i + 1 < bytes.length ? alphabet[((b & 15) << 2) | (c >> 6)] : "=";
    out += i + 2 < bytes.length ? alphabet[c & 63] : "=";
  }
  return out;
}
