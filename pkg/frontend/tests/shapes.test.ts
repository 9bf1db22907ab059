import { describe, expect, it } from "vitest";

import { elementMarkup, shapeFor, shapeMarkup, wrapLabel } from "../src/shapes.js";
import { ELEMENT_KINDS } from "../src/types.js";

describe("kind/shape mapping", () => {
  it("matches the fixed vocabulary", () => {
    expect(shapeFor("strategy")).toBe("rounded_rectangle");
    expect(shapeFor("mechanism")).toBe("diamond");
    expect(shapeFor("barrier")).toBe("octagon");
    expect(shapeFor("moderator")).toBe("rectangle");
    expect(shapeFor("precondition")).toBe("isosceles_trapezoid");
    expect(shapeFor("proximal_outcome")).toBe("circle");
    expect(shapeFor("intermediate_outcome")).toBe("circle");
    expect(shapeFor("distal_outcome")).toBe("circle");
  });

  it("renders every kind (visual regression snapshots)", () => {
    for (const kind of ELEMENT_KINDS) {
      expect(shapeMarkup(kind, 0, 0)).toMatchSnapshot(kind);
    }
  });

  it("distinguishes the rounded rectangle from the plain one", () => {
    expect(shapeMarkup("strategy", 0, 0)).toContain('rx="14"');
    expect(shapeMarkup("moderator", 0, 0)).toContain('rx="0"');
  });

  it("renders all outcome kinds as the same circle", () => {
    const circle = shapeMarkup("proximal_outcome", 10, 20);
    expect(shapeMarkup("intermediate_outcome", 10, 20)).toBe(circle);
    expect(shapeMarkup("distal_outcome", 10, 20)).toBe(circle);
    expect(circle).toContain("<ellipse");
  });
});

describe("labels", () => {
  it("wraps at 22 characters and truncates at three lines", () => {
    const lines = wrapLabel("word ".repeat(30).trim());
    expect(lines).toHaveLength(3);
    expect(lines[2].endsWith("…")).toBe(true);
  });

  it("escapes markup-sensitive text", () => {
    expect(elementMarkup("barrier", 'A & B <now> "q"', 0, 0)).toContain(
      "A &amp; B &lt;now&gt; &quot;q&quot;",
    );
  });
});
