import { inflateSync } from "node:zlib";
import { describe, expect, it } from "vitest";

import { encodePng, pngDimensions } from "../src/png.js";

describe("encodePng", () => {
  it("writes a decodable RGBA image", () => {
    const width = 3;
    const height = 2;
    const rgba = new Uint8Array(width * height * 4);
    rgba.set([255, 0, 0, 255], 0); // top-left red
    rgba.set([0, 0, 255, 255], (width * height - 1) * 4); // bottom-right blue
    const png = encodePng(width, height, rgba);

    expect(png.subarray(0, 8)).toEqual(Buffer.from([137, 80, 78, 71, 13, 10, 26, 10]));
    expect(pngDimensions(png)).toEqual({ width, height });

    // pull the IDAT payload back out and unfilter (all rows use filter 0)
    const idatStart = png.indexOf(Buffer.from("IDAT"));
    const length = png.readUInt32BE(idatStart - 4);
    const raw = inflateSync(png.subarray(idatStart + 4, idatStart + 4 + length));
    expect(raw.length).toBe(height * (1 + width * 4));
    expect(raw[0]).toBe(0);
    expect([...raw.subarray(1, 5)]).toEqual([255, 0, 0, 255]);
    expect([...raw.subarray(raw.length - 4)]).toEqual([0, 0, 255, 255]);
  });

  it("rejects mismatched buffer sizes", () => {
    expect(() => encodePng(4, 4, new Uint8Array(10))).toThrow(/expected/);
  });
});
