/**
 * Float reader for the exact scalars that instance documents carry.
 *
 * Documents serialize every coordinate as either a JSON number or a
 * small LaTeX expression: an optional rational head and an optional
 * sqrt(2) tail, each possibly wrapped in \frac.  The studio only needs
 * display values, so scalars collapse to doubles here and exactness is
 * left to the service.
 */

// Head: integer, decimal, or \frac{int}{int}, optionally negated.
const HEAD = String.raw`-?(?:\\frac\{\d+\}\{\d+\}|\d+(?:\.\d+)?(?:[eE][-+]?\d+)?)`;
// Tail: m*sqrt(2), bare or as \frac{m\sqrt{2}}{d}, with optional sign.
const TAIL = String.raw`[-+]?(?:\\frac\{(?:\d+)?\\sqrt\{2\}\}\{\d+\}|(?:\d+)?\\sqrt\{2\})`;
const SCALAR = new RegExp(`^(${HEAD})?(${TAIL})?$`);
// A radical with a coefficient ("3\sqrt{2}") is one term, not a "3"
// head followed by an unsigned tail; try the tail-only reading first.
const TAIL_ONLY = new RegExp(`^(${TAIL})$`);

function fracParts(term: string): [number, number] {
  const m = /^\\frac\{(\d+)\}\{(\d+)\}$/.exec(term);
  if (m) return [Number(m[1]), Number(m[2])];
  return [Number(term), 1];
}

function tailValue(term: string): number {
  let sign = 1;
  let body = term;
  if (body.startsWith("+")) body = body.slice(1);
  else if (body.startsWith("-")) {
    sign = -1;
    body = body.slice(1);
  }
  const frac = /^\\frac\{(\d*)\\sqrt\{2\}\}\{(\d+)\}$/.exec(body);
  if (frac) {
    const m = frac[1] === "" ? 1 : Number(frac[1]);
    return (sign * m * Math.SQRT2) / Number(frac[2]);
  }
  const bare = /^(\d*)\\sqrt\{2\}$/.exec(body);
  if (bare) {
    const m = bare[1] === "" ? 1 : Number(bare[1]);
    return sign * m * Math.SQRT2;
  }
  throw new Error(`unreadable scalar tail: ${term}`);
}

/** Parse one serialized coordinate (JSON number or LaTeX string) to a double. */
export function parseScalar(value: unknown): number {
  if (typeof value === "number") {
    if (!Number.isFinite(value)) throw new Error(`non-finite scalar: ${value}`);
    return value;
  }
  if (typeof value !== "string") throw new Error(`scalar must be a number or string, got ${typeof value}`);
  const text = value.trim();
  if (text === "") throw new Error("empty scalar");
  const plain = Number(text);
  if (Number.isFinite(plain)) return plain;
  const tailOnly = TAIL_ONLY.exec(text);
  if (tailOnly) return tailValue(tailOnly[1]!);
  const m = SCALAR.exec(text);
  if (!m || (m[1] === undefined && m[2] === undefined)) {
    throw new Error(`unreadable scalar: ${text}`);
  }
  let out = 0;
  if (m[1] !== undefined) {
    const headText = m[1];
    const negative = headText.startsWith("-");
    const [n, d] = fracParts(negative ? headText.slice(1) : headText);
    out += ((negative ? -1 : 1) * n) / d;
    // With a head present the tail must carry its own sign, otherwise
    // "1\sqrt{2}" would silently read as 1 + sqrt(2).
    if (m[2] !== undefined && !/^[-+]/.test(m[2])) {
      throw new Error(`unreadable scalar: ${text}`);
    }
  }
  if (m[2] !== undefined) out += tailValue(m[2]);
  return out;
}
