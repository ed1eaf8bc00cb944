import { describe, expect, it } from "vitest";

import {
  badgeClassFor,
  boundDisplay,
  fullPrecision,
  paramDisplay,
  percentDisplay,
} from "../src/format.js";

describe("display rounding", () => {
  it("bounds show two decimals", () => {
    expect(boundDisplay(1.5629455445544558)).toBe("1.56");
    expect(boundDisplay(3.502412961047915)).toBe("3.50");
    expect(boundDisplay(1)).toBe("1.00");
  });

  it("parameters show four decimals", () => {
    expect(paramDisplay(2.7088548207546244)).toBe("2.7089");
    expect(paramDisplay(2.329312625243076)).toBe("2.3293");
    expect(paramDisplay(1.5625329603872766)).toBe("1.5625");
  });

  it("full precision is the raw number", () => {
    expect(fullPrecision(1.5625329603872766)).toBe("1.5625329603872766");
  });

  it("percent display", () => {
    expect(percentDisplay(0.2857142857)).toBe("28.6%");
  });

  it("non-finite values pass through", () => {
    expect(boundDisplay(Infinity)).toBe("Infinity");
  });
});

describe("verdict badges", () => {
  it("maps each verdict to its own class", () => {
    expect(badgeClassFor("sharp")).toBe("badge badge-sharp");
    expect(badgeClassFor("inconclusive")).toBe("badge badge-inconclusive");
    expect(badgeClassFor("not_sharp")).toBe("badge badge-notsharp");
  });

  it("unknown verdicts fall back to the plain badge", () => {
    expect(badgeClassFor("mystery")).toBe("badge");
  });
});
