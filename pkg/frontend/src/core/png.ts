/** Minimal PNG codec for sketch rasters.
 *
 * Writing targets the exact subset the layer exporter needs: 8-bit grayscale,
 * no interlace, scanlines stored in uncompressed deflate blocks.  Stored
 * blocks keep the encoder deterministic and dependency-free while remaining a
 * fully valid zlib stream for any standard reader, so a layer exported here is
 * decodable by the generation service byte-for-byte.
 *
 * Reading implements real inflate (stored, fixed and dynamic Huffman blocks)
 * plus all five scanline filters, so PNGs produced elsewhere -- e.g. sketches
 * written by the dataset builder or images returned by the service -- can be
 * re-imported too.  8-bit grayscale, grayscale+alpha, RGB and RGBA are
 * accepted; import keeps the first channel.
 */

export interface DecodedPng {
  readonly width: number;
  readonly height: number;
  readonly channels: 1 | 2 | 3 | 4;
  /** Interleaved samples, length = width * height * channels. */
  readonly pixels: Uint8Array;
}

const SIGNATURE = [137, 80, 78, 71, 13, 10, 26, 10];

// -- checksums ---------------------------------------------------------------

const CRC_TABLE = (() => {
  const table = new Uint32Array(256);
  for (let n = 0; n < 256; n++) {
    let c = n;
    for (let k = 0; k < 8; k++) c = c & 1 ? 0xedb88320 ^ (c >>> 1) : c >>> 1;
    table[n] = c >>> 0;
  }
  return table;
})();

function crc32(bytes: Uint8Array): number {
  let c = 0xffffffff;
  for (let i = 0; i < bytes.length; i++) c = CRC_TABLE[(c ^ bytes[i]!) & 255]! ^ (c >>> 8);
  return (c ^ 0xffffffff) >>> 0;
}

function adler32(bytes: Uint8Array): number {
  let a = 1;
  let b = 0;
  for (let i = 0; i < bytes.length; i++) {
    a = (a + bytes[i]!) % 65521;
    b = (b + a) % 65521;
  }
  return ((b << 16) | a) >>> 0;
}

// -- byte plumbing -----------------------------------------------------------

function u32be(n: number): Uint8Array {
  return new Uint8Array([(n >>> 24) & 255, (n >>> 16) & 255, (n >>> 8) & 255, n & 255]);
}

function concatBytes(parts: readonly Uint8Array[]): Uint8Array {
  let total = 0;
  for (const p of parts) total += p.length;
  const out = new Uint8Array(total);
  let o = 0;
  for (const p of parts) {
    out.set(p, o);
    o += p.length;
  }
  return out;
}

function chunk(type: string, data: Uint8Array): Uint8Array {
  const typeBytes = new Uint8Array([...type].map((c) => c.charCodeAt(0)));
  const body = concatBytes([typeBytes, data]);
  return concatBytes([u32be(data.length), body, u32be(crc32(body))]);
}

// -- zlib: stored-block writer, full inflate reader ---------------------------

function zlibStored(raw: Uint8Array): Uint8Array {
  const parts: Uint8Array[] = [new Uint8Array([0x78, 0x01])];
  const blockMax = 65535;
  let offset = 0;
  do {
    const len = Math.min(blockMax, raw.length - offset);
    const final = offset + len >= raw.length ? 1 : 0;
    const header = new Uint8Array(5);
    header[0] = final;
    header[1] = len & 255;
    header[2] = (len >> 8) & 255;
    header[3] = ~len & 255;
    header[4] = (~len >> 8) & 255;
    parts.push(header, raw.subarray(offset, offset + len));
    offset += len;
  } while (offset < raw.length);
  parts.push(u32be(adler32(raw)));
  return concatBytes(parts);
}

class BitReader {
  private pos = 0;
  private bit = 0;

  constructor(private readonly data: Uint8Array) {}

  readBit(): number {
    if (this.pos >= this.data.length) throw new Error("deflate stream truncated");
    const out = (this.data[this.pos]! >> this.bit) & 1;
    this.bit++;
    if (this.bit === 8) {
      this.bit = 0;
      this.pos++;
    }
    return out;
  }

  readBits(count: number): number {
    let out = 0;
    for (let i = 0; i < count; i++) out |= this.readBit() << i;
    return out;
  }

  alignByte(): void {
    if (this.bit !== 0) {
      this.bit = 0;
      this.pos++;
    }
  }

  readBytes(count: number): Uint8Array {
    this.alignByte();
    if (this.pos + count > this.data.length) throw new Error("deflate stream truncated");
    const out = this.data.subarray(this.pos, this.pos + count);
    this.pos += count;
    return out;
  }
}

interface Huffman {
  readonly counts: Int32Array;
  readonly symbols: Int32Array;
}

const MAX_BITS = 15;

function buildHuffman(lengths: readonly number[]): Huffman {
  const counts = new Int32Array(MAX_BITS + 1);
  for (const len of lengths) counts[len]!++;
  counts[0] = 0;
  const offsets = new Int32Array(MAX_BITS + 2);
  for (let len = 1; len <= MAX_BITS; len++) offsets[len + 1] = offsets[len]! + counts[len]!;
  const symbols = new Int32Array(lengths.length);
  for (let sym = 0; sym < lengths.length; sym++) {
    const len = lengths[sym]!;
    if (len !== 0) {
      symbols[offsets[len]!] = sym;
      offsets[len] = offsets[len]! + 1;
    }
  }
  return { counts, symbols };
}

function decodeSymbol(reader: BitReader, huffman: Huffman): number {
  let code = 0;
  let first = 0;
  let index = 0;
  for (let len = 1; len <= MAX_BITS; len++) {
    code |= reader.readBit();
    const count = huffman.counts[len]!;
    if (code - first < count) return huffman.symbols[index + (code - first)]!;
    index += count;
    first = (first + count) << 1;
    code <<= 1;
  }
  throw new Error("invalid huffman code");
}

const LENGTH_BASE = [3, 4, 5, 6, 7, 8, 9, 10, 11, 13, 15, 17, 19, 23, 27, 31, 35, 43, 51, 59, 67, 83, 99, 115, 131, 163, 195, 227, 258];
const LENGTH_EXTRA = [0, 0, 0, 0, 0, 0, 0, 0, 1, 1, 1, 1, 2, 2, 2, 2, 3, 3, 3, 3, 4, 4, 4, 4, 5, 5, 5, 5, 0];
const DIST_BASE = [1, 2, 3, 4, 5, 7, 9, 13, 17, 25, 33, 49, 65, 97, 129, 193, 257, 385, 513, 769, 1025, 1537, 2049, 3073, 4097, 6145, 8193, 12289, 16385, 24577];
const DIST_EXTRA = [0, 0, 0, 0, 1, 1, 2, 2, 3, 3, 4, 4, 5, 5, 6, 6, 7, 7, 8, 8, 9, 9, 10, 10, 11, 11, 12, 12, 13, 13];
const CLEN_ORDER = [16, 17, 18, 0, 8, 7, 9, 6, 10, 5, 11, 4, 12, 3, 13, 2, 14, 1, 15];

const FIXED_LITLEN = (() => {
  const lengths = new Array<number>(288);
  for (let i = 0; i < 144; i++) lengths[i] = 8;
  for (let i = 144; i < 256; i++) lengths[i] = 9;
  for (let i = 256; i < 280; i++) lengths[i] = 7;
  for (let i = 280; i < 288; i++) lengths[i] = 8;
  return buildHuffman(lengths);
})();

const FIXED_DIST = buildHuffman(new Array<number>(30).fill(5));

class ByteSink {
  private buf: Uint8Array;
  length = 0;

  constructor(hint: number) {
    this.buf = new Uint8Array(Math.max(hint, 1024));
  }

  private grow(extra: number): void {
    if (this.length + extra <= this.buf.length) return;
    const next = new Uint8Array(Math.max(this.buf.length * 2, this.length + extra));
    next.set(this.buf.subarray(0, this.length));
    this.buf = next;
  }

  push(byte: number): void {
    this.grow(1);
    this.buf[this.length++] = byte;
  }

  pushAll(bytes: Uint8Array): void {
    this.grow(bytes.length);
    this.buf.set(bytes, this.length);
    this.length += bytes.length;
  }

  copyBack(distance: number, count: number): void {
    if (distance <= 0 || distance > this.length) throw new Error("invalid back-reference distance");
    this.grow(count);
    for (let i = 0; i < count; i++) {
      this.buf[this.length] = this.buf[this.length - distance]!;
      this.length++;
    }
  }

  bytes(): Uint8Array {
    return this.buf.subarray(0, this.length);
  }
}

function inflateBlock(reader: BitReader, sink: ByteSink, litlen: Huffman, dist: Huffman): void {
  for (;;) {
    const sym = decodeSymbol(reader, litlen);
    if (sym < 256) {
      sink.push(sym);
    } else if (sym === 256) {
      return;
    } else {
      const li = sym - 257;
      if (li >= LENGTH_BASE.length) throw new Error("invalid length symbol");
      const length = LENGTH_BASE[li]! + reader.readBits(LENGTH_EXTRA[li]!);
      const dsym = decodeSymbol(reader, dist);
      if (dsym >= DIST_BASE.length) throw new Error("invalid distance symbol");
      const distance = DIST_BASE[dsym]! + reader.readBits(DIST_EXTRA[dsym]!);
      sink.copyBack(distance, length);
    }
  }
}

function readDynamicTables(reader: BitReader): { litlen: Huffman; dist: Huffman } {
  const hlit = reader.readBits(5) + 257;
  const hdist = reader.readBits(5) + 1;
  const hclen = reader.readBits(4) + 4;
  const clenLengths = new Array<number>(19).fill(0);
  for (let i = 0; i < hclen; i++) clenLengths[CLEN_ORDER[i]!] = reader.readBits(3);
  const clen = buildHuffman(clenLengths);

  const lengths = new Array<number>(hlit + hdist).fill(0);
  let i = 0;
  while (i < lengths.length) {
    const sym = decodeSymbol(reader, clen);
    if (sym < 16) {
      lengths[i++] = sym;
    } else if (sym === 16) {
      if (i === 0) throw new Error("repeat with no previous code length");
      const prev = lengths[i - 1]!;
      const repeat = 3 + reader.readBits(2);
      for (let r = 0; r < repeat; r++) lengths[i++] = prev;
    } else if (sym === 17) {
      i += 3 + reader.readBits(3);
    } else {
      i += 11 + reader.readBits(7);
    }
  }
  if (i > lengths.length) throw new Error("code length overflow");
  return {
    litlen: buildHuffman(lengths.slice(0, hlit)),
    dist: buildHuffman(lengths.slice(hlit)),
  };
}

export function inflate(compressed: Uint8Array, sizeHint = 0): Uint8Array {
  const reader = new BitReader(compressed);
  const sink = new ByteSink(sizeHint);
  let final = 0;
  do {
    final = reader.readBit();
    const type = reader.readBits(2);
    if (type === 0) {
      const lenBytes = reader.readBytes(4);
      const len = lenBytes[0]! | (lenBytes[1]! << 8);
      const nlen = lenBytes[2]! | (lenBytes[3]! << 8);
      if ((len ^ 0xffff) !== nlen) throw new Error("stored block length mismatch");
      sink.pushAll(reader.readBytes(len));
    } else if (type === 1) {
      inflateBlock(reader, sink, FIXED_LITLEN, FIXED_DIST);
    } else if (type === 2) {
      const tables = readDynamicTables(reader);
      inflateBlock(reader, sink, tables.litlen, tables.dist);
    } else {
      throw new Error("reserved deflate block type");
    }
  } while (!final);
  return sink.bytes();
}

export function zlibDecompress(stream: Uint8Array, sizeHint = 0): Uint8Array {
  if (stream.length < 6) throw new Error("zlib stream too short");
  const cmf = stream[0]!;
  const flg = stream[1]!;
  if ((cmf & 0x0f) !== 8) throw new Error("unsupported zlib compression method");
  if ((cmf * 256 + flg) % 31 !== 0) throw new Error("corrupt zlib header");
  if (flg & 0x20) throw new Error("preset dictionaries are not supported");
  const raw = inflate(stream.subarray(2, stream.length - 4), sizeHint);
  const view = new DataView(stream.buffer, stream.byteOffset + stream.length - 4, 4);
  if (adler32(raw) !== view.getUint32(0)) throw new Error("zlib checksum mismatch");
  return raw;
}

// -- PNG write ---------------------------------------------------------------

/** Encode 8-bit grayscale pixels as a PNG.  Deterministic: the same pixels
 * always produce the same bytes. */
export function encodeGrayPng(width: number, height: number, gray: Uint8Array): Uint8Array {
  if (gray.length !== width * height) {
    throw new RangeError(`expected ${width * height} grayscale bytes, got ${gray.length}`);
  }
  const ihdr = new Uint8Array(13);
  ihdr.set(u32be(width), 0);
  ihdr.set(u32be(height), 4);
  ihdr[8] = 8; // bit depth
  ihdr[9] = 0; // grayscale
  // compression 0, filter 0, interlace 0 already zeroed

  const raw = new Uint8Array(height * (width + 1));
  for (let y = 0; y < height; y++) {
    raw.set(gray.subarray(y * width, (y + 1) * width), y * (width + 1) + 1);
  }

  return concatBytes([
    new Uint8Array(SIGNATURE),
    chunk("IHDR", ihdr),
    chunk("IDAT", zlibStored(raw)),
    chunk("IEND", new Uint8Array(0)),
  ]);
}

// -- PNG read ----------------------------------------------------------------

function paeth(a: number, b: number, c: number): number {
  const p = a + b - c;
  const pa = Math.abs(p - a);
  const pb = Math.abs(p - b);
  const pc = Math.abs(p - c);
  if (pa <= pb && pa <= pc) return a;
  if (pb <= pc) return b;
  return c;
}

function unfilter(raw: Uint8Array, width: number, height: number, channels: number): Uint8Array {
  const stride = width * channels;
  if (raw.length !== height * (stride + 1)) throw new Error("scanline data has the wrong size");
  const out = new Uint8Array(height * stride);
  for (let y = 0; y < height; y++) {
    const filter = raw[y * (stride + 1)]!;
    const rowIn = raw.subarray(y * (stride + 1) + 1, (y + 1) * (stride + 1));
    const rowOut = out.subarray(y * stride, (y + 1) * stride);
    const prior = y > 0 ? out.subarray((y - 1) * stride, y * stride) : null;
    for (let x = 0; x < stride; x++) {
      const left = x >= channels ? rowOut[x - channels]! : 0;
      const up = prior ? prior[x]! : 0;
      const upLeft = prior && x >= channels ? prior[x - channels]! : 0;
      let value = rowIn[x]!;
      switch (filter) {
        case 0:
          break;
        case 1:
          value += left;
          break;
        case 2:
          value += up;
          break;
        case 3:
          value += (left + up) >> 1;
          break;
        case 4:
          value += paeth(left, up, upLeft);
          break;
        default:
          throw new Error(`unknown scanline filter ${filter}`);
      }
      rowOut[x] = value & 255;
    }
  }
  return out;
}

const CHANNELS_BY_COLOR_TYPE: Record<number, 1 | 2 | 3 | 4> = { 0: 1, 2: 3, 4: 2, 6: 4 };

export function decodePng(bytes: Uint8Array): DecodedPng {
  for (let i = 0; i < SIGNATURE.length; i++) {
    if (bytes[i] !== SIGNATURE[i]) throw new Error("not a PNG: bad signature");
  }
  let offset = SIGNATURE.length;
  let width = 0;
  let height = 0;
  let channels: 1 | 2 | 3 | 4 = 1;
  let seenIhdr = false;
  const idat: Uint8Array[] = [];
  while (offset < bytes.length) {
    if (offset + 8 > bytes.length) throw new Error("truncated PNG chunk header");
    const view = new DataView(bytes.buffer, bytes.byteOffset + offset, 8);
    const length = view.getUint32(0);
    const type = String.fromCharCode(bytes[offset + 4]!, bytes[offset + 5]!, bytes[offset + 6]!, bytes[offset + 7]!);
    const data = bytes.subarray(offset + 8, offset + 8 + length);
    if (data.length !== length) throw new Error("truncated PNG chunk body");
    if (type === "IHDR") {
      const ihdr = new DataView(bytes.buffer, bytes.byteOffset + offset + 8, length);
      width = ihdr.getUint32(0);
      height = ihdr.getUint32(4);
      const bitDepth = data[8]!;
      const colorType = data[9]!;
      const interlace = data[12]!;
      if (bitDepth !== 8) throw new Error(`unsupported bit depth ${bitDepth} (only 8 is handled)`);
      const ch = CHANNELS_BY_COLOR_TYPE[colorType];
      if (ch === undefined) throw new Error(`unsupported color type ${colorType}`);
      if (interlace !== 0) throw new Error("interlaced PNGs are not supported");
      channels = ch;
      seenIhdr = true;
    } else if (type === "IDAT") {
      idat.push(data);
    } else if (type === "IEND") {
      break;
    }
    offset += 8 + length + 4; // skip the CRC; checksums verified at zlib level
  }
  if (!seenIhdr) throw new Error("PNG has no IHDR chunk");
  if (idat.length === 0) throw new Error("PNG has no IDAT chunks");
  const raw = zlibDecompress(concatBytes(idat), height * (width * channels + 1));
  return { width, height, channels, pixels: unfilter(raw, width, height, channels) };
}

/** First-channel view of a decoded PNG (identity for grayscale). */
export function firstChannel(decoded: DecodedPng): Uint8Array {
  if (decoded.channels === 1) return decoded.pixels;
  const out = new Uint8Array(decoded.width * decoded.height);
  for (let i = 0; i < out.length; i++) out[i] = decoded.pixels[i * decoded.channels]!;
  return out;
}
