//! Netpbm and PNG input/output. Binary output is black = 1 in P4 and
//! black = 0 in PNG, as each format expects.

use std::fs::File;
use std::io::{BufReader, BufWriter, Cursor, Read, Write};
use std::path::Path;

use super::image::{BinaryImage, GrayImage};
use crate::error::{Error, Result};

/// PNG text keyword carrying the rank table hash.
pub const TABLE_HASH_KEY: &str = "polydither-table";

fn fmt_err(msg: impl Into<String>) -> Error {
    Error::Format(msg.into())
}

/// Reads whitespace-separated header tokens, skipping `#` comments.
fn pnm_token(data: &[u8], pos: &mut usize) -> Result<String> {
    loop {
        while *pos < data.len() && data[*pos].is_ascii_whitespace() {
            *pos += 1;
        }
        if *pos < data.len() && data[*pos] == b'#' {
            while *pos < data.len() && data[*pos] != b'\n' {
                *pos += 1;
            }
            continue;
        }
        break;
    }
    let start = *pos;
    while *pos < data.len() && !data[*pos].is_ascii_whitespace() {
        *pos += 1;
    }
    if start == *pos {
        return Err(fmt_err("truncated PNM header"));
    }
    Ok(String::from_utf8_lossy(&data[start..*pos]).into_owned())
}

/// Decodes a binary (P5) graymap, 8- or 16-bit.
pub fn decode_pgm(data: &[u8]) -> Result<GrayImage> {
    let mut pos = 0;
    if pnm_token(data, &mut pos)? != "P5" {
        return Err(fmt_err("not a binary PGM (P5)"));
    }
    let num = |pos: &mut usize| -> Result<u32> {
        pnm_token(data, pos)?
            .parse()
            .map_err(|_| fmt_err("bad PGM header number"))
    };
    let (w, h, max) = (num(&mut pos)?, num(&mut pos)?, num(&mut pos)?);
    if max == 0 || max > 65535 {
        return Err(fmt_err(format!("bad PGM maxval {max}")));
    }
    pos += 1;
    let n = w as usize * h as usize;
    let bytes = if max < 256 { 1 } else { 2 };
    let body = data
        .get(pos..pos + n * bytes)
        .ok_or_else(|| fmt_err("truncated PGM data"))?;
    let samples = (0..n)
        .map(|i| {
            let v = if bytes == 1 {
                body[i] as u32
            } else {
                u16::from_be_bytes([body[2 * i], body[2 * i + 1]]) as u32
            };
            (v.min(max) as f64) / max as f64
        })
        .collect();
    GrayImage::new(w, h, samples)
}

/// Encodes an 8-bit P5 graymap.
pub fn encode_pgm(img: &GrayImage) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n255\n", img.width(), img.height()).into_bytes();
    out.extend(img.to_u8());
    out
}

/// Encodes a P4 bitmap: rows packed MSB first, each padded to a byte.
pub fn encode_pbm(img: &BinaryImage) -> Vec<u8> {
    let (w, h) = (img.width() as usize, img.height() as usize);
    let mut out = format!("P4\n{w} {h}\n").into_bytes();
    let stride = w.div_ceil(8);
    for y in 0..h {
        let mut row = vec![0u8; stride];
        for x in 0..w {
            if img.pixels()[y * w + x] {
                row[x / 8] |= 0x80 >> (x % 8);
            }
        }
        out.extend(row);
    }
    out
}

pub fn decode_pbm(data: &[u8]) -> Result<BinaryImage> {
    let mut pos = 0;
    if pnm_token(data, &mut pos)? != "P4" {
        return Err(fmt_err("not a binary PBM (P4)"));
    }
    let num = |pos: &mut usize| -> Result<usize> {
        pnm_token(data, pos)?
            .parse()
            .map_err(|_| fmt_err("bad PBM header number"))
    };
    let (w, h) = (num(&mut pos)?, num(&mut pos)?);
    pos += 1;
    let stride = w.div_ceil(8);
    let body = data
        .get(pos..pos + stride * h)
        .ok_or_else(|| fmt_err("truncated PBM data"))?;
    let black = (0..h)
        .flat_map(|y| (0..w).map(move |x| body[y * stride + x / 8] & (0x80 >> (x % 8)) != 0))
        .collect();
    BinaryImage::new(w as u32, h as u32, black)
}

/// Decodes a PNG to gray; color is reduced with Rec. 601 luma, alpha ignored.
pub fn decode_png(data: &[u8]) -> Result<GrayImage> {
    let mut dec = png::Decoder::new(Cursor::new(data));
    dec.set_transformations(png::Transformations::normalize_to_color8());
    let mut reader = dec.read_info().map_err(|e| fmt_err(format!("PNG: {e}")))?;
    let mut buf = vec![
        0;
        reader
            .output_buffer_size()
            .ok_or_else(|| fmt_err("PNG too large"))?
    ];
    let info = reader
        .next_frame(&mut buf)
        .map_err(|e| fmt_err(format!("PNG: {e}")))?;
    let (w, h) = (info.width as usize, info.height as usize);
    let ch = match info.color_type {
        png::ColorType::Grayscale => 1,
        png::ColorType::GrayscaleAlpha => 2,
        png::ColorType::Rgb => 3,
        png::ColorType::Rgba => 4,
        other => return Err(fmt_err(format!("unsupported PNG color type {other:?}"))),
    };
    let mut samples = Vec::with_capacity(w * h);
    for y in 0..h {
        let row = &buf[y * info.line_size..];
        for x in 0..w {
            let p = &row[x * ch..];
            let v = if ch >= 3 {
                0.299 * p[0] as f64 + 0.587 * p[1] as f64 + 0.114 * p[2] as f64
            } else {
                p[0] as f64
            };
            samples.push((v / 255.0).clamp(0.0, 1.0));
        }
    }
    GrayImage::new(w as u32, h as u32, samples)
}

fn png_bytes(
    width: u32,
    height: u32,
    depth: png::BitDepth,
    data: &[u8],
    text: &[(&str, &str)],
) -> Result<Vec<u8>> {
    let mut out = Vec::new();
    {
        let mut enc = png::Encoder::new(&mut out, width, height);
        enc.set_color(png::ColorType::Grayscale);
        enc.set_depth(depth);
        for (k, v) in text {
            enc.add_text_chunk(k.to_string(), v.to_string())
                .map_err(|e| fmt_err(format!("PNG: {e}")))?;
        }
        let mut w = enc
            .write_header()
            .map_err(|e| fmt_err(format!("PNG: {e}")))?;
        w.write_image_data(data)
            .map_err(|e| fmt_err(format!("PNG: {e}")))?;
    }
    Ok(out)
}

/// 8-bit gray PNG, black 0 and white 255, with optional text chunks.
pub fn encode_binary_png(img: &BinaryImage, text: &[(&str, &str)]) -> Result<Vec<u8>> {
    let data: Vec<u8> = img
        .pixels()
        .iter()
        .map(|&b| if b { 0 } else { 255 })
        .collect();
    png_bytes(img.width(), img.height(), png::BitDepth::Eight, &data, text)
}

/// 16-bit gray PNG.
pub fn encode_gray16_png(width: u32, height: u32, samples: &[u16]) -> Result<Vec<u8>> {
    let data: Vec<u8> = samples.iter().flat_map(|v| v.to_be_bytes()).collect();
    png_bytes(width, height, png::BitDepth::Sixteen, &data, &[])
}

/// Text chunks of a PNG.
pub fn png_text(data: &[u8]) -> Result<Vec<(String, String)>> {
    let reader = png::Decoder::new(Cursor::new(data))
        .read_info()
        .map_err(|e| fmt_err(format!("PNG: {e}")))?;
    Ok(reader
        .info()
        .uncompressed_latin1_text
        .iter()
        .map(|t| (t.keyword.clone(), t.text.clone()))
        .collect())
}

/// Reads a P5 PGM or a PNG, chosen by content.
pub fn read_gray(path: &Path) -> Result<GrayImage> {
    let mut data = Vec::new();
    BufReader::new(File::open(path)?).read_to_end(&mut data)?;
    if data.starts_with(b"\x89PNG") {
        decode_png(&data)
    } else if data.starts_with(b"P5") {
        decode_pgm(&data)
    } else {
        Err(fmt_err(format!(
            "{} is neither P5 PGM nor PNG",
            path.display()
        )))
    }
}

/// Writes a binary image as PNG when the path ends in `.png`, else as P4.
/// The table hash, if given, goes into PNG metadata.
pub fn write_binary(path: &Path, img: &BinaryImage, table_hash: Option<&str>) -> Result<()> {
    let is_png = path
        .extension()
        .and_then(|e| e.to_str())
        .is_some_and(|e| e.eq_ignore_ascii_case("png"));
    let bytes = if is_png {
        let text: Vec<(&str, &str)> = table_hash
            .map(|h| (TABLE_HASH_KEY, h))
            .into_iter()
            .collect();
        encode_binary_png(img, &text)?
    } else {
        encode_pbm(img)
    };
    let mut f = BufWriter::new(File::create(path)?);
    f.write_all(&bytes)?;
    f.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pbm_packs_msb_first_with_padding() {
        let img = BinaryImage::new(
            10,
            2,
            (0..20).map(|i| i == 0 || i == 9 || i == 10).collect(),
        )
        .unwrap();
        let bytes = encode_pbm(&img);
        let header = b"P4\n10 2\n";
        assert_eq!(&bytes[..header.len()], header);
        assert_eq!(&bytes[header.len()..], &[0x80, 0x40, 0x80, 0x00]);
        assert_eq!(decode_pbm(&bytes).unwrap(), img);
    }

    #[test]
    fn pgm_round_trip_and_comments() {
        let img = GrayImage::from_u8(3, 2, &[0, 51, 255, 1, 2, 3]).unwrap();
        assert_eq!(decode_pgm(&encode_pgm(&img)).unwrap(), img);
        let commented = b"P5 # c\n3 1\n# more\n255\n\x00\x80\xff";
        let g = decode_pgm(commented).unwrap();
        assert_eq!(g.samples()[2], 1.0);
        assert!(decode_pgm(b"P2\n1 1\n255\n0").is_err());
        assert!(decode_pgm(b"P5\n4 4\n255\n\x00").is_err());
    }

    #[test]
    fn sixteen_bit_pgm() {
        let data = b"P5\n2 1\n65535\n\x00\x00\xff\xff";
        assert_eq!(decode_pgm(data).unwrap().samples(), &[0.0, 1.0]);
    }

    #[test]
    fn png_round_trip_keeps_hash() {
        let img = BinaryImage::new(3, 1, vec![true, false, true]).unwrap();
        let bytes = encode_binary_png(&img, &[(TABLE_HASH_KEY, "abc")]).unwrap();
        let g = decode_png(&bytes).unwrap();
        assert_eq!(g.samples(), &[0.0, 1.0, 0.0]);
        assert_eq!(
            png_text(&bytes).unwrap(),
            vec![(TABLE_HASH_KEY.to_string(), "abc".to_string())]
        );
    }
}
