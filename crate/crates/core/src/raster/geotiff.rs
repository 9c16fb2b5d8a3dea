//! A deliberately small GeoTIFF reader.
//!
//! Supported: classic TIFF (either byte order), the first IFD only, one
//! sample per pixel, int16/uint16/float32 samples, strips or tiles, no
//! compression or Deflate, no predictor. Georeferencing comes from
//! ModelPixelScale + ModelTiepoint (or an axis-aligned ModelTransformation),
//! nodata from the GDAL_NODATA ASCII tag. Anything else is rejected with
//! [`Error::Unsupported`] naming the feature.

use std::io::Read;

use flate2::read::ZlibDecoder;

use super::DemGrid;
use crate::error::{Error, Result};
use crate::geomath::Crs;

const IMAGE_WIDTH: u16 = 256;
const IMAGE_LENGTH: u16 = 257;
const BITS_PER_SAMPLE: u16 = 258;
const COMPRESSION: u16 = 259;
const STRIP_OFFSETS: u16 = 273;
const SAMPLES_PER_PIXEL: u16 = 277;
const ROWS_PER_STRIP: u16 = 278;
const STRIP_BYTE_COUNTS: u16 = 279;
const PLANAR_CONFIGURATION: u16 = 284;
const PREDICTOR: u16 = 317;
const TILE_WIDTH: u16 = 322;
const TILE_LENGTH: u16 = 323;
const TILE_OFFSETS: u16 = 324;
const TILE_BYTE_COUNTS: u16 = 325;
const SAMPLE_FORMAT: u16 = 339;
const MODEL_PIXEL_SCALE: u16 = 33550;
const MODEL_TIEPOINT: u16 = 33922;
const MODEL_TRANSFORMATION: u16 = 34264;
const GEO_KEY_DIRECTORY: u16 = 34735;
const GDAL_NODATA: u16 = 42113;

const GT_RASTER_TYPE_KEY: u16 = 1025;
const RASTER_PIXEL_IS_POINT: u16 = 2;
const GEOGRAPHIC_TYPE_KEY: u16 = 2048;
const PROJECTED_CS_TYPE_KEY: u16 = 3072;

#[derive(Clone, Copy, Debug, PartialEq)]
enum SampleKind {
    U16,
    I16,
    F32,
}

impl SampleKind {
    fn bytes(self) -> usize {
        match self {
            SampleKind::U16 | SampleKind::I16 => 2,
            SampleKind::F32 => 4,
        }
    }
}

#[derive(Clone, Copy)]
struct Cursor<'a> {
    data: &'a [u8],
    little: bool,
}

impl<'a> Cursor<'a> {
    fn slice(&self, offset: usize, len: usize) -> Result<&'a [u8]> {
        offset
            .checked_add(len)
            .and_then(|end| self.data.get(offset..end))
            .ok_or_else(|| {
                Error::Parse(format!(
                    "truncated TIFF: need bytes {offset}..{} of {}",
                    offset.saturating_add(len),
                    self.data.len()
                ))
            })
    }

    fn u16(&self, offset: usize) -> Result<u16> {
        let b: [u8; 2] = self.slice(offset, 2)?.try_into().unwrap();
        Ok(if self.little { u16::from_le_bytes(b) } else { u16::from_be_bytes(b) })
    }

    fn u32(&self, offset: usize) -> Result<u32> {
        let b: [u8; 4] = self.slice(offset, 4)?.try_into().unwrap();
        Ok(if self.little { u32::from_le_bytes(b) } else { u32::from_be_bytes(b) })
    }

    fn u64(&self, offset: usize) -> Result<u64> {
        let b: [u8; 8] = self.slice(offset, 8)?.try_into().unwrap();
        Ok(if self.little { u64::from_le_bytes(b) } else { u64::from_be_bytes(b) })
    }
}

/// One raw IFD entry.
struct Entry {
    tag: u16,
    field_type: u16,
    count: usize,
    /// Offset of the value bytes (inline or pointed to).
    value_at: usize,
}

fn type_size(field_type: u16) -> Option<usize> {
    match field_type {
        1 | 2 | 6 | 7 => Some(1),
        3 | 8 => Some(2),
        4 | 9 | 11 => Some(4),
        5 | 10 | 12 => Some(8),
        _ => None,
    }
}

struct Ifd<'a> {
    cur: Cursor<'a>,
    entries: Vec<Entry>,
}

impl<'a> Ifd<'a> {
    fn read(cur: Cursor<'a>, offset: usize) -> Result<Self> {
        let n = cur.u16(offset)? as usize;
        let mut entries = Vec::with_capacity(n);
        for i in 0..n {
            let at = offset + 2 + i * 12;
            let tag = cur.u16(at)?;
            let field_type = cur.u16(at + 2)?;
            let count = cur.u32(at + 4)? as usize;
            let Some(size) = type_size(field_type) else {
                // Unknown field types are skippable per the TIFF spec.
                continue;
            };
            let total = size.saturating_mul(count);
            let value_at = if total <= 4 { at + 8 } else { cur.u32(at + 8)? as usize };
            cur.slice(value_at, total)?;
            entries.push(Entry { tag, field_type, count, value_at });
        }
        Ok(Ifd { cur, entries })
    }

    fn entry(&self, tag: u16) -> Option<&Entry> {
        self.entries.iter().find(|e| e.tag == tag)
    }

    fn unsigned(&self, tag: u16) -> Result<Option<Vec<u64>>> {
        let Some(e) = self.entry(tag) else { return Ok(None) };
        let mut out = Vec::with_capacity(e.count);
        for i in 0..e.count {
            let v = match e.field_type {
                1 | 7 => self.cur.slice(e.value_at + i, 1)?[0] as u64,
                3 => self.cur.u16(e.value_at + 2 * i)? as u64,
                4 => self.cur.u32(e.value_at + 4 * i)? as u64,
                t => return Err(Error::Parse(format!("tag {tag} has non-integer type {t}"))),
            };
            out.push(v);
        }
        Ok(Some(out))
    }

    fn scalar(&self, tag: u16) -> Result<Option<u64>> {
        Ok(self.unsigned(tag)?.and_then(|v| v.first().copied()))
    }

    fn doubles(&self, tag: u16) -> Result<Option<Vec<f64>>> {
        let Some(e) = self.entry(tag) else { return Ok(None) };
        let mut out = Vec::with_capacity(e.count);
        for i in 0..e.count {
            let v = match e.field_type {
                12 => f64::from_bits(self.cur.u64(e.value_at + 8 * i)?),
                11 => f32::from_bits(self.cur.u32(e.value_at + 4 * i)?) as f64,
                t => return Err(Error::Parse(format!("tag {tag} has non-float type {t}"))),
            };
            out.push(v);
        }
        Ok(Some(out))
    }

    fn ascii(&self, tag: u16) -> Result<Option<String>> {
        let Some(e) = self.entry(tag) else { return Ok(None) };
        let raw = self.cur.slice(e.value_at, e.count)?;
        let text = String::from_utf8_lossy(raw);
        Ok(Some(text.trim_matches(|c: char| c == '\0' || c.is_whitespace()).to_string()))
    }
}

fn required(ifd: &Ifd, tag: u16, name: &str) -> Result<u64> {
    ifd.scalar(tag)?
        .ok_or_else(|| Error::Parse(format!("missing required TIFF tag {name} ({tag})")))
}

fn sample_kind(format: u64, bits: u64) -> Result<SampleKind> {
    match (format, bits) {
        (1, 16) => Ok(SampleKind::U16),
        (2, 16) => Ok(SampleKind::I16),
        (3, 32) => Ok(SampleKind::F32),
        (1, b) => Err(Error::Unsupported(format!("{b}-bit unsigned integer samples"))),
        (2, b) => Err(Error::Unsupported(format!("{b}-bit signed integer samples"))),
        (3, b) => Err(Error::Unsupported(format!("{b}-bit floating-point samples"))),
        (f, b) => Err(Error::Unsupported(format!("sample format {f} with {b} bits"))),
    }
}

fn compression_name(code: u64) -> String {
    match code {
        2 => "CCITT RLE compression".into(),
        3 | 4 => "CCITT fax compression".into(),
        5 => "LZW compression".into(),
        6 => "old-style JPEG compression".into(),
        7 => "JPEG compression".into(),
        32773 => "PackBits compression".into(),
        34887 => "LERC compression".into(),
        50000 => "ZSTD compression".into(),
        50001 => "WebP compression".into(),
        c => format!("compression code {c}"),
    }
}

struct Layout {
    /// Chunk width and height in pixels.
    chunk_w: usize,
    chunk_h: usize,
    chunks_across: usize,
    offsets: Vec<u64>,
    counts: Vec<u64>,
    tiled: bool,
}

fn layout(ifd: &Ifd, width: usize, height: usize) -> Result<Layout> {
    if let Some(tile_w) = ifd.scalar(TILE_WIDTH)? {
        let tile_h = required(ifd, TILE_LENGTH, "TileLength")? as usize;
        let tile_w = tile_w as usize;
        if tile_w == 0 || tile_h == 0 {
            return Err(Error::Parse("zero tile size".into()));
        }
        let offsets = ifd
            .unsigned(TILE_OFFSETS)?
            .ok_or_else(|| Error::Parse("missing required TIFF tag TileOffsets (324)".into()))?;
        let counts = ifd
            .unsigned(TILE_BYTE_COUNTS)?
            .ok_or_else(|| Error::Parse("missing required TIFF tag TileByteCounts (325)".into()))?;
        let across = width.div_ceil(tile_w);
        let expected = across * height.div_ceil(tile_h);
        if offsets.len() != expected || counts.len() != expected {
            return Err(Error::Parse(format!(
                "expected {expected} tiles, found {} offsets and {} byte counts",
                offsets.len(),
                counts.len()
            )));
        }
        return Ok(Layout { chunk_w: tile_w, chunk_h: tile_h, chunks_across: across, offsets, counts, tiled: true });
    }
    let rows_per_strip = ifd.scalar(ROWS_PER_STRIP)?.map_or(height, |r| (r as usize).min(height));
    if rows_per_strip == 0 {
        return Err(Error::Parse("RowsPerStrip is zero".into()));
    }
    let offsets = ifd
        .unsigned(STRIP_OFFSETS)?
        .ok_or_else(|| Error::Parse("missing required TIFF tag StripOffsets (273)".into()))?;
    let counts = ifd
        .unsigned(STRIP_BYTE_COUNTS)?
        .ok_or_else(|| Error::Parse("missing required TIFF tag StripByteCounts (279)".into()))?;
    let expected = height.div_ceil(rows_per_strip);
    if offsets.len() != expected || counts.len() != expected {
        return Err(Error::Parse(format!(
            "expected {expected} strips, found {} offsets and {} byte counts",
            offsets.len(),
            counts.len()
        )));
    }
    Ok(Layout { chunk_w: width, chunk_h: rows_per_strip, chunks_across: 1, offsets, counts, tiled: false })
}

fn decode_sample(kind: SampleKind, b: &[u8], little: bool) -> f64 {
    match kind {
        SampleKind::U16 => {
            let a = [b[0], b[1]];
            (if little { u16::from_le_bytes(a) } else { u16::from_be_bytes(a) }) as f64
        }
        SampleKind::I16 => {
            let a = [b[0], b[1]];
            (if little { i16::from_le_bytes(a) } else { i16::from_be_bytes(a) }) as f64
        }
        SampleKind::F32 => {
            let a = [b[0], b[1], b[2], b[3]];
            (if little { f32::from_le_bytes(a) } else { f32::from_be_bytes(a) }) as f64
        }
    }
}

struct GeoKeys {
    pixel_is_point: bool,
    crs: Crs,
}

fn geo_keys(ifd: &Ifd) -> Result<GeoKeys> {
    let mut keys = GeoKeys { pixel_is_point: false, crs: Crs::Wgs84 };
    let Some(dir) = ifd.unsigned(GEO_KEY_DIRECTORY)? else {
        return Ok(keys);
    };
    if dir.len() < 4 {
        return Err(Error::Parse("GeoKeyDirectory shorter than its header".into()));
    }
    let n = dir[3] as usize;
    for key in dir[4..].chunks_exact(4).take(n) {
        let (id, location, value) = (key[0] as u16, key[1], key[3]);
        // Only short values stored inline matter here.
        if location != 0 {
            continue;
        }
        match id {
            GT_RASTER_TYPE_KEY => keys.pixel_is_point = value as u16 == RASTER_PIXEL_IS_POINT,
            PROJECTED_CS_TYPE_KEY => match value {
                3857 => keys.crs = Crs::WebMercator,
                code => return Err(Error::Unsupported(format!("projected CRS EPSG:{code}"))),
            },
            GEOGRAPHIC_TYPE_KEY if value != 4326 && value != 32767 => {
                return Err(Error::Unsupported(format!("geographic CRS EPSG:{value}")))
            }
            _ => {}
        }
    }
    Ok(keys)
}

/// Parses the supported GeoTIFF subset into a [`DemGrid`].
pub fn parse_geotiff(bytes: &[u8]) -> Result<DemGrid> {
    if bytes.len() < 8 {
        return Err(Error::Parse(format!("truncated TIFF: {} byte header", bytes.len())));
    }
    let little = match &bytes[0..2] {
        b"II" => true,
        b"MM" => false,
        _ => return Err(Error::Parse("not a TIFF file (bad byte-order mark)".into())),
    };
    let cur = Cursor { data: bytes, little };
    match cur.u16(2)? {
        42 => {}
        43 => return Err(Error::Unsupported("BigTIFF".into())),
        m => return Err(Error::Parse(format!("not a TIFF file (magic {m})"))),
    }
    let ifd = Ifd::read(cur, cur.u32(4)? as usize)?;

    let width = required(&ifd, IMAGE_WIDTH, "ImageWidth")? as usize;
    let height = required(&ifd, IMAGE_LENGTH, "ImageLength")? as usize;
    let samples = ifd.scalar(SAMPLES_PER_PIXEL)?.unwrap_or(1);
    if samples != 1 {
        return Err(Error::Unsupported(format!("multi-band image ({samples} samples per pixel)")));
    }
    let _ = ifd.scalar(PLANAR_CONFIGURATION)?;
    let compression = ifd.scalar(COMPRESSION)?.unwrap_or(1);
    let deflate = match compression {
        1 => false,
        8 | 32946 => true,
        c => return Err(Error::Unsupported(compression_name(c))),
    };
    match ifd.scalar(PREDICTOR)?.unwrap_or(1) {
        1 => {}
        2 => return Err(Error::Unsupported("horizontal differencing predictor".into())),
        3 => return Err(Error::Unsupported("floating-point predictor".into())),
        p => return Err(Error::Unsupported(format!("predictor {p}"))),
    }
    let bits = ifd.scalar(BITS_PER_SAMPLE)?.unwrap_or(1);
    let kind = sample_kind(ifd.scalar(SAMPLE_FORMAT)?.unwrap_or(1), bits)?;

    let layout = layout(&ifd, width, height)?;
    let bps = kind.bytes();
    let mut values = vec![0.0; width * height];
    for (idx, (&offset, &count)) in layout.offsets.iter().zip(&layout.counts).enumerate() {
        let (chunk_row, chunk_col) = (idx / layout.chunks_across, idx % layout.chunks_across);
        let row0 = chunk_row * layout.chunk_h;
        let col0 = chunk_col * layout.chunk_w;
        let rows = layout.chunk_h.min(height - row0);
        let cols = layout.chunk_w.min(width - col0);
        // Tiles are always full size on disk; the last strip may be short.
        let stored_rows = if layout.tiled { layout.chunk_h } else { rows };
        let expected = stored_rows * layout.chunk_w * bps;

        let raw = cur.slice(offset as usize, count as usize)?;
        let decoded;
        let data: &[u8] = if deflate {
            let mut buf = Vec::with_capacity(expected);
            ZlibDecoder::new(raw)
                .read_to_end(&mut buf)
                .map_err(|e| Error::Parse(format!("Deflate stream of chunk {idx}: {e}")))?;
            decoded = buf;
            &decoded
        } else {
            raw
        };
        if data.len() < expected {
            return Err(Error::Parse(format!(
                "chunk {idx} holds {} bytes, expected {expected}",
                data.len()
            )));
        }
        for r in 0..rows {
            let src_row = &data[r * layout.chunk_w * bps..];
            let dst = (row0 + r) * width + col0;
            for c in 0..cols {
                values[dst + c] = decode_sample(kind, &src_row[c * bps..(c + 1) * bps], little);
            }
        }
    }

    let keys = geo_keys(&ifd)?;
    let (mut origin_x, mut origin_y, pixel_w, pixel_h) = georeference(&ifd)?;
    if keys.pixel_is_point {
        origin_x -= pixel_w / 2.0;
        origin_y += pixel_h / 2.0;
    }
    let nodata = match ifd.ascii(GDAL_NODATA)? {
        None => None,
        Some(text) if text.eq_ignore_ascii_case("nan") => Some(f64::NAN),
        Some(text) => Some(
            text.parse::<f64>()
                .map_err(|_| Error::Parse(format!("GDAL_NODATA `{text}` is not a number")))?,
        ),
    };
    // NaN sentinels are already caught by the NaN check in DemGrid.
    let nodata = nodata.filter(|v| !v.is_nan());
    DemGrid::new(keys.crs, origin_x, origin_y, pixel_w, pixel_h, width, height, nodata, values)
}

/// `(origin_x, origin_y, pixel_w, pixel_h)` of the outer top-left corner.
fn georeference(ifd: &Ifd) -> Result<(f64, f64, f64, f64)> {
    let scale = ifd.doubles(MODEL_PIXEL_SCALE)?;
    let tiepoint = ifd.doubles(MODEL_TIEPOINT)?;
    if let (Some(scale), Some(tie)) = (&scale, &tiepoint) {
        if scale.len() < 2 || tie.len() < 6 {
            return Err(Error::Parse("short ModelPixelScale or ModelTiepoint".into()));
        }
        if tie.len() > 6 {
            return Err(Error::Unsupported("multiple tiepoints".into()));
        }
        let (sx, sy) = (scale[0], scale[1]);
        let (i, j, x, y) = (tie[0], tie[1], tie[3], tie[4]);
        return Ok((x - i * sx, y + j * sy, sx, sy));
    }
    if let Some(m) = ifd.doubles(MODEL_TRANSFORMATION)? {
        if m.len() < 16 {
            return Err(Error::Parse("short ModelTransformation".into()));
        }
        if m[1] != 0.0 || m[4] != 0.0 {
            return Err(Error::Unsupported("rotated ModelTransformation".into()));
        }
        if m[5].is_nan() || m[5] >= 0.0 {
            return Err(Error::Unsupported("south-up raster".into()));
        }
        return Ok((m[3], m[7], m[0], -m[5]));
    }
    Err(Error::Parse("missing georeferencing (ModelPixelScale + ModelTiepoint)".into()))
}
