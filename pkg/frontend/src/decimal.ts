// Display transforms over decimal strings from the API.  No arithmetic
// happens client-side: scaling between g/kg/t is a decimal-point shift
// and rounding is banker's rounding, both on digit strings, so the
// displayed value is exactly the server value after documented rounding
// and never a float approximation.

interface Parts {
  negative: boolean;
  int: string; // no leading zeros (may be "0")
  frac: string; // may be ""
}

function parse(value: string): Parts {
  const trimmed = value.trim();
  const match = /^(-?)(\d+)(?:\.(\d*))?$/.exec(trimmed);
  if (!match) {
    // exponent forms are not produced for report amounts; fail loudly
    throw new Error(`not a plain decimal string: ${value}`);
  }
  return {
    negative: match[1] === "-",
    int: match[2].replace(/^0+(?=\d)/, ""),
    frac: match[3] ?? "",
  };
}

function toString(parts: Parts): string {
  const frac = parts.frac.replace(/0+$/, "");
  const sign = parts.negative && (parts.int !== "0" || frac !== "") ? "-" : "";
  return sign + parts.int + (frac ? "." + frac : "");
}

/** Multiply by 10^places by moving the decimal point. Exact. */
export function shiftDecimal(value: string, places: number): string {
  const parts = parse(value);
  let digits = parts.int + parts.frac;
  let point = parts.int.length + places; // index of the decimal point in `digits`
  while (point > digits.length) digits += "0";
  while (point < 1) {
    digits = "0" + digits;
    point += 1;
  }
  return toString({
    negative: parts.negative,
    int: digits.slice(0, point).replace(/^0+(?=\d)/, ""),
    frac: digits.slice(point),
  });
}

/** Round half-to-even at `decimals` fractional digits; keeps the digits. */
export function roundHalfEven(value: string, decimals: number): string {
  const parts = parse(value);
  let digits = parts.int + parts.frac;
  const keep = parts.int.length + decimals; // digits to keep
  if (digits.length <= keep) {
    return parts.int + (decimals ? "." + parts.frac.padEnd(decimals, "0") : "");
  }
  let kept = digits.slice(0, keep);
  const dropped = digits.slice(keep);
  const first = dropped[0];
  const restNonZero = /[1-9]/.test(dropped.slice(1));
  let roundUp = false;
  if (first > "5" || (first === "5" && restNonZero)) {
    roundUp = true;
  } else if (first === "5" && !restNonZero) {
    const last = kept ? kept[kept.length - 1] : "0";
    roundUp = Number(last) % 2 === 1; // half: go to the even neighbor
  }
  if (roundUp) {
    const carried = (BigInt(kept || "0") + 1n).toString().padStart(kept.length, "0");
    kept = carried;
  }
  // the carry may have grown the integer part by one digit
  const intLength = kept.length - decimals;
  const int = (intLength > 0 ? kept.slice(0, intLength) : "0").replace(/^0+(?=\d)/, "");
  const frac = decimals ? kept.slice(intLength > 0 ? intLength : 0).padStart(decimals, "0") : "";
  const sign = parts.negative ? "-" : "";
  return sign + int + (decimals ? "." + frac : "");
}

/** Insert thousands separators into the integer part. */
export function groupThousands(value: string): string {
  const [int, frac] = value.split(".");
  const sign = int.startsWith("-") ? "-" : "";
  const bare = sign ? int.slice(1) : int;
  const grouped = bare.replace(/\B(?=(\d{3})+(?!\d))/g, ",");
  return sign + grouped + (frac !== undefined ? "." + frac : "");
}

function greaterOrEqual(value: string, threshold: string): boolean {
  const parts = parse(value);
  const t = parse(threshold);
  if (parts.int.length !== t.int.length) return parts.int.length > t.int.length;
  if (parts.int !== t.int) return parts.int > t.int;
  return true; // equal integer part and threshold has no fraction
}

export interface ScaledMass {
  unit: "g" | "kg" | "t";
  /** rounded half-even to one decimal, with thousands separators */
  display: string;
}

/**
 * Pick a display unit for a kg amount: grams below 1 kg, tonnes from
 * 10000 kg, kilograms in between; then round half-even to one decimal.
 */
export function scaleMass(kg: string): ScaledMass {
  let unit: "g" | "kg" | "t";
  let value: string;
  if (!greaterOrEqual(kg, "1")) {
    unit = "g";
    value = shiftDecimal(kg, 3);
  } else if (greaterOrEqual(kg, "10000")) {
    unit = "t";
    value = shiftDecimal(kg, -3);
  } else {
    unit = "kg";
    value = kg;
  }
  return { unit, display: groupThousands(roundHalfEven(value, 1)) };
}

export function formatMass(kg: string): string {
  const scaled = scaleMass(kg);
  return `${scaled.display} ${scaled.unit}`;
}

/** Client-side check before any request: positive, finite, plain number. */
export function isValidQuantity(text: string): boolean {
  if (!/^\d+(\.\d+)?$/.test(text.trim())) return false;
  return /[1-9]/.test(text);
}
