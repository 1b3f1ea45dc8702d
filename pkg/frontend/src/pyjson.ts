/** JSON text that matches the service's canonical form byte for byte.
 *
 * The backend writes every JSON artifact as
 * `json.dumps(doc, sort_keys=True, indent=2) + "\n"` with shortest
 * round-trip float reprs.  Two things here reproduce that exactly:
 *
 * - `canonicalEnvText` re-serializes an environment draft whose numbers
 *   are all floats, so an imported file re-exports byte-identically and
 *   a sketched file is accepted verbatim by the CLI.
 * - `parseWithLexemes` / `emitCanonical` re-emit a subtree of a service
 *   response (e.g. the `report` member) while keeping every number and
 *   string token exactly as the service spelled it, which is what makes
 *   the downloaded report byte-identical to the CLI's report.json.
 */

/** CPython `repr(float)`: shortest digits, fixed form for decimal
 * exponents in [-4, 16), otherwise `d.ddde±XX` with a two-digit
 * exponent.  JS `toExponential()` supplies the same shortest digits;
 * only the layout differs. */
export function pyFloatRepr(v: number): string {
  if (!Number.isFinite(v)) {
    throw new Error(`non-finite number cannot be serialized: ${v}`);
  }
  if (v === 0) return Object.is(v, -0) ? "-0.0" : "0.0";
  const [mantissa, expPart] = v.toExponential().split("e");
  const neg = mantissa.startsWith("-");
  const digits = (neg ? mantissa.slice(1) : mantissa).replace(".", "");
  const e = parseInt(expPart, 10);
  const sign = neg ? "-" : "";
  if (e < -4 || e >= 16) {
    const mant = digits.length > 1 ? `${digits[0]}.${digits.slice(1)}` : digits;
    const es = e < 0 ? "-" : "+";
    const ea = String(Math.abs(e)).padStart(2, "0");
    return `${sign}${mant}e${es}${ea}`;
  }
  if (e < 0) {
    return `${sign}0.${"0".repeat(-e - 1)}${digits}`;
  }
  if (e >= digits.length - 1) {
    return `${sign}${digits}${"0".repeat(e - digits.length + 1)}.0`;
  }
  return `${sign}${digits.slice(0, e + 1)}.${digits.slice(e + 1)}`;
}

/** Decimal rounding to nine places, matching the precision the backend
 * rounds its float output to.  Drafts snap to centimetres so this is an
 * identity in practice; it exists so pathological inputs cannot leak
 * fifteen-digit noise into an exported file. */
export function round9(v: number): number {
  const r = Number(v.toFixed(9));
  return r === 0 ? 0 : r;
}

/** Python's default ensure_ascii string escaping. */
export function pyEscapeString(s: string): string {
  let out = '"';
  for (const ch of s) {
    const code = ch.codePointAt(0)!;
    if (ch === '"') out += '\\"';
    else if (ch === "\\") out += "\\\\";
    else if (ch === "\n") out += "\\n";
    else if (ch === "\r") out += "\\r";
    else if (ch === "\t") out += "\\t";
    else if (ch === "\b") out += "\\b";
    else if (ch === "\f") out += "\\f";
    else if (code < 0x20) out += "\\u" + code.toString(16).padStart(4, "0");
    else if (code < 0x7f) out += ch;
    else if (code <= 0xffff) out += "\\u" + code.toString(16).padStart(4, "0");
    else {
      // astral plane: surrogate pair, as json.dumps writes it
      const c = code - 0x10000;
      out += "\\u" + (0xd800 + (c >> 10)).toString(16).padStart(4, "0");
      out += "\\u" + (0xdc00 + (c & 0x3ff)).toString(16).padStart(4, "0");
    }
  }
  return out + '"';
}

type JsonLike =
  | null
  | boolean
  | number
  | string
  | JsonLike[]
  | { [key: string]: JsonLike };

/** Canonical text for a plain value where every number is a float.
 * That convention holds for environment files (coordinates, heights),
 * which is the only place the UI authors numbers of its own. */
export function canonicalFloatJson(value: JsonLike): string {
  return emitValue(value, 0) + "\n";
}

function emitValue(value: JsonLike, depth: number): string {
  const pad = "  ".repeat(depth);
  const inner = "  ".repeat(depth + 1);
  if (value === null) return "null";
  if (typeof value === "boolean") return value ? "true" : "false";
  if (typeof value === "number") return pyFloatRepr(value);
  if (typeof value === "string") return pyEscapeString(value);
  if (Array.isArray(value)) {
    if (value.length === 0) return "[]";
    const items = value.map((v) => inner + emitValue(v, depth + 1));
    return "[\n" + items.join(",\n") + "\n" + pad + "]";
  }
  const keys = Object.keys(value).sort();
  if (keys.length === 0) return "{}";
  const items = keys.map(
    (k) => `${inner}${pyEscapeString(k)}: ${emitValue(value[k], depth + 1)}`,
  );
  return "{\n" + items.join(",\n") + "\n" + pad + "}";
}

// ---------------------------------------------------------------------------
// lexeme-preserving re-emission
// ---------------------------------------------------------------------------

export type LexNode =
  | { t: "lex"; raw: string }
  | { t: "arr"; items: LexNode[] }
  | { t: "obj"; entries: { key: string; raw: string; val: LexNode }[] };

class Cursor {
  i = 0;
  constructor(readonly text: string) {}

  skipWs(): void {
    while (this.i < this.text.length && " \t\n\r".includes(this.text[this.i])) {
      this.i += 1;
    }
  }

  peek(): string {
    if (this.i >= this.text.length) throw new Error("unexpected end of JSON");
    return this.text[this.i];
  }

  expect(ch: string): void {
    if (this.text[this.i] !== ch) {
      throw new Error(`expected '${ch}' at offset ${this.i}`);
    }
    this.i += 1;
  }
}

function parseString(c: Cursor): string {
  const startAt = c.i;
  c.expect('"');
  while (c.peek() !== '"') {
    if (c.peek() === "\\") c.i += 2;
    else c.i += 1;
  }
  c.expect('"');
  return c.text.slice(startAt, c.i);
}

function parseNode(c: Cursor): LexNode {
  c.skipWs();
  const ch = c.peek();
  if (ch === "{") {
    c.expect("{");
    const entries: { key: string; raw: string; val: LexNode }[] = [];
    c.skipWs();
    if (c.peek() === "}") {
      c.expect("}");
      return { t: "obj", entries };
    }
    for (;;) {
      c.skipWs();
      const raw = parseString(c);
      const key = JSON.parse(raw) as string;
      c.skipWs();
      c.expect(":");
      const val = parseNode(c);
      entries.push({ key, raw, val });
      c.skipWs();
      if (c.peek() === ",") {
        c.expect(",");
        continue;
      }
      c.expect("}");
      return { t: "obj", entries };
    }
  }
  if (ch === "[") {
    c.expect("[");
    const items: LexNode[] = [];
    c.skipWs();
    if (c.peek() === "]") {
      c.expect("]");
      return { t: "arr", items };
    }
    for (;;) {
      items.push(parseNode(c));
      c.skipWs();
      if (c.peek() === ",") {
        c.expect(",");
        continue;
      }
      c.expect("]");
      return { t: "arr", items };
    }
  }
  if (ch === '"') {
    return { t: "lex", raw: parseString(c) };
  }
  // number / true / false / null: take the token verbatim
  const start = c.i;
  while (
    c.i < c.text.length &&
    !' \t\n\r,]}"'.includes(c.text[c.i])
  ) {
    c.i += 1;
  }
  const raw = c.text.slice(start, c.i);
  if (raw.length === 0) throw new Error(`bad token at offset ${start}`);
  return { t: "lex", raw };
}

export function parseWithLexemes(text: string): LexNode {
  const c = new Cursor(text);
  const node = parseNode(c);
  c.skipWs();
  if (c.i !== text.length) throw new Error("trailing content after JSON value");
  return node;
}

/** Canonical layout (sorted keys, two-space indent, trailing newline)
 * with every scalar emitted exactly as it appeared in the source. */
export function emitCanonical(node: LexNode): string {
  return emitLex(node, 0) + "\n";
}

function emitLex(node: LexNode, depth: number): string {
  const pad = "  ".repeat(depth);
  const inner = "  ".repeat(depth + 1);
  if (node.t === "lex") return node.raw;
  if (node.t === "arr") {
    if (node.items.length === 0) return "[]";
    const items = node.items.map((v) => inner + emitLex(v, depth + 1));
    return "[\n" + items.join(",\n") + "\n" + pad + "]";
  }
  if (node.entries.length === 0) return "{}";
  const entries = [...node.entries].sort((a, b) =>
    a.key < b.key ? -1 : a.key > b.key ? 1 : 0,
  );
  const items = entries.map(
    (e) => `${inner}${e.raw}: ${emitLex(e.val, depth + 1)}`,
  );
  return "{\n" + items.join(",\n") + "\n" + pad + "}";
}

/** Extract one top-level member of a response body and render it as a
 * standalone canonical document -- the report exactly as the CLI would
 * have written it to report.json. */
export function memberAsCanonicalText(bodyText: string, member: string): string | null {
  const root = parseWithLexemes(bodyText);
  if (root.t !== "obj") return null;
  const entry = root.entries.find((e) => e.key === member);
  return entry ? emitCanonical(entry.val) : null;
}
