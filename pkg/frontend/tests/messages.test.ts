import { describe, expect, it } from "vitest";
import { frameMessage, gestureMessage, parseInbound } from "../src/messages.js";

describe("parseInbound", () => {
  it("accepts a well-formed state message", () => {
    const msg = parseInbound(
      JSON.stringify({ type: "state", x: 1.5, y: 2, theta: 0.1, grip: false, tick: 3 }),
    );
    expect(msg).toEqual({ type: "state", x: 1.5, y: 2, theta: 0.1, grip: false, tick: 3 });
  });

  it("accepts class messages including Unknown", () => {
    expect(
      parseInbound(JSON.stringify({ type: "class", label: null, distance: 9, frame_seq: 1 })),
    ).toEqual({ type: "class", label: null, distance: 9, frame_seq: 1 });
    expect(
      parseInbound(JSON.stringify({ type: "class", label: 4, distance: 0.5, frame_seq: 2 })),
    ).toEqual({ type: "class", label: 4, distance: 0.5, frame_seq: 2 });
  });

  it("accepts a 9x9 view raster", () => {
    const cells = Array.from({ length: 9 }, () => Array(9).fill(0));
    cells[4][4] = 2;
    cells[0][3] = 1;
    expect(parseInbound(JSON.stringify({ type: "view", cells }))).toEqual({
      type: "view",
      cells,
    });
  });

  it("rejects malformed input without throwing", () => {
    const bad = [
      "not json",
      "42",
      "null",
      "[]",
      JSON.stringify({ type: "nope" }),
      JSON.stringify({ type: "state", x: "1", y: 2, theta: 3, grip: true, tick: 4 }),
      JSON.stringify({ type: "state", x: NaN, y: 2, theta: 3, grip: true, tick: 4 }),
      JSON.stringify({ type: "class", label: 1, distance: 2 }),
      JSON.stringify({ type: "view", cells: [[0]] }),
      JSON.stringify({ type: "view", cells: Array(9).fill(Array(9).fill(7)) }),
    ];
    for (const text of bad) expect(parseInbound(text)).toBeNull();
  });
});

describe("outbound messages", () => {
  it("gesture payload matches the gateway schema exactly", () => {
    expect(JSON.parse(gestureMessage(3))).toEqual({ type: "gesture", label: 3 });
  });

  it("rejects labels outside 0..254", () => {
    expect(() => gestureMessage(-1)).toThrow(RangeError);
    expect(() => gestureMessage(255)).toThrow(RangeError);
    expect(() => gestureMessage(1.5)).toThrow(RangeError);
  });

  it("frame payload carries the base64 body verbatim", () => {
    expect(JSON.parse(frameMessage("UDUK"))).toEqual({ type: "frame", data: "UDUK" });
  });
});
