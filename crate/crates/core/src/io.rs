//! Image file I/O: PNG, binary PPM/PGM, and the raw float container.
//!
//! The raw container ("NTF1") holds `height`, `width`, `channels` as 32-bit
//! little-endian unsigned integers after the 4-byte magic, followed by
//! `h*w*c` 32-bit little-endian floats in plane-major order. It is the only
//! lossless interchange format and also the wire format of the external
//! denoiser protocol.
//!
//! 8-bit formats scale samples by 1/255 on load; on save they clamp to
//! `[0,1]` and quantize with round-half-away-from-zero. Files are written to
//! a temporary sibling and renamed into place, so readers never observe a
//! partial file.

use std::io::{Read, Write};
use std::path::Path;

use image::{DynamicImage, ImageFormat};

use crate::error::{Error, Result};
use crate::image_buf::ImageBuf;
use crate::scalar::Scalar;

const NTF1_MAGIC: &[u8; 4] = b"NTF1";

/// Loads a PNG, binary PPM/PGM, or raw float container into a raster scaled
/// to `[0,1]` (raw containers are taken as-is).
pub fn load_image<T: Scalar>(path: impl AsRef<Path>) -> Result<ImageBuf<T>> {
    let path = path.as_ref();
    let bytes = std::fs::read(path)
        .map_err(|e| Error::Format(format!("cannot read {}: {e}", path.display())))?;
    if bytes.starts_with(NTF1_MAGIC) {
        return parse_ntf1(&bytes);
    }
    let decoded = image::load_from_memory(&bytes)
        .map_err(|e| Error::Format(format!("cannot decode {}: {e}", path.display())))?;
    from_dynamic(decoded, path)
}

/// Saves a raster; the format is chosen by extension (`png`, `ppm`, `pgm`,
/// `pnm`, `ntf`).
pub fn save_image<T: Scalar>(img: &ImageBuf<T>, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let ext = path
        .extension()
        .and_then(|e| e.to_str())
        .map(|e| e.to_ascii_lowercase())
        .unwrap_or_default();
    let bytes = match ext.as_str() {
        "ntf" => ntf1_bytes(img),
        "png" => encode_png(img)?,
        "pgm" | "ppm" | "pnm" => encode_pnm(img, &ext)?,
        other => {
            return Err(Error::UnsupportedFormat(format!(
                "extension `{other}` (use png, ppm, pgm, pnm or ntf)"
            )))
        }
    };
    write_atomic(path, &bytes)
}

/// Serializes a raster as an NTF1 container.
pub fn ntf1_bytes<T: Scalar>(img: &ImageBuf<T>) -> Vec<u8> {
    let mut out = Vec::with_capacity(16 + img.len() * 4);
    out.extend_from_slice(NTF1_MAGIC);
    out.extend_from_slice(&(img.height() as u32).to_le_bytes());
    out.extend_from_slice(&(img.width() as u32).to_le_bytes());
    out.extend_from_slice(&(img.channels() as u32).to_le_bytes());
    for v in img.data() {
        out.extend_from_slice(&(v.as_f64() as f32).to_le_bytes());
    }
    out
}

/// Parses an NTF1 container from a byte buffer.
pub fn parse_ntf1<T: Scalar>(bytes: &[u8]) -> Result<ImageBuf<T>> {
    if bytes.len() < 16 || &bytes[0..4] != NTF1_MAGIC {
        return Err(Error::Format("missing NTF1 magic".into()));
    }
    let h = u32::from_le_bytes(bytes[4..8].try_into().unwrap()) as usize;
    let w = u32::from_le_bytes(bytes[8..12].try_into().unwrap()) as usize;
    let c = u32::from_le_bytes(bytes[12..16].try_into().unwrap()) as usize;
    let n = h
        .checked_mul(w)
        .and_then(|v| v.checked_mul(c))
        .ok_or_else(|| Error::Format("NTF1 header overflow".into()))?;
    let body = &bytes[16..];
    if body.len() != n * 4 {
        return Err(Error::Format(format!(
            "NTF1 body has {} bytes, header {}x{}x{} needs {}",
            body.len(),
            h,
            w,
            c,
            n * 4
        )));
    }
    let data = body
        .chunks_exact(4)
        .map(|ch| T::from_f64_c(f64::from(f32::from_le_bytes(ch.try_into().unwrap()))))
        .collect();
    ImageBuf::from_vec(data, h, w, c)
}

/// Writes an NTF1 container to a stream (external denoiser protocol).
pub fn write_ntf1<T: Scalar>(img: &ImageBuf<T>, w: &mut impl Write) -> Result<()> {
    w.write_all(&ntf1_bytes(img))?;
    Ok(())
}

/// Reads one NTF1 container from a stream, consuming it to the end.
pub fn read_ntf1<T: Scalar>(r: &mut impl Read) -> Result<ImageBuf<T>> {
    let mut bytes = Vec::new();
    r.read_to_end(&mut bytes)?;
    parse_ntf1(&bytes)
}

/// Clamp to `[0,1]`, then `round(v*255)` half away from zero.
pub fn quantize_u8<T: Scalar>(v: T) -> u8 {
    let v = v.as_f64().clamp(0.0, 1.0);
    (v * 255.0).round() as u8
}

fn from_dynamic<T: Scalar>(img: DynamicImage, path: &Path) -> Result<ImageBuf<T>> {
    let (planar, h, w, c) = match img {
        DynamicImage::ImageLuma8(g) => {
            let (w, h) = g.dimensions();
            (g.into_raw(), h as usize, w as usize, 1)
        }
        DynamicImage::ImageLumaA8(g) => {
            let g = DynamicImage::ImageLumaA8(g).to_luma8();
            let (w, h) = g.dimensions();
            (g.into_raw(), h as usize, w as usize, 1)
        }
        DynamicImage::ImageRgb8(rgb) => {
            let (w, h) = rgb.dimensions();
            (rgb.into_raw(), h as usize, w as usize, 3)
        }
        DynamicImage::ImageRgba8(rgba) => {
            let rgb = DynamicImage::ImageRgba8(rgba).to_rgb8();
            let (w, h) = rgb.dimensions();
            (rgb.into_raw(), h as usize, w as usize, 3)
        }
        other => {
            return Err(Error::UnsupportedFormat(format!(
                "{}: only 8-bit grayscale/RGB input is supported, got {other:?}",
                path.display()
            )))
        }
    };
    if h == 0 || w == 0 {
        return Err(Error::Format(format!("{}: zero-sized image", path.display())));
    }
    // Decoded buffers are interleaved; rasters are plane-major.
    let scale = 1.0 / 255.0;
    let mut data = vec![T::zero(); h * w * c];
    for ch in 0..c {
        for i in 0..h * w {
            data[ch * h * w + i] = T::from_f64_c(f64::from(planar[i * c + ch]) * scale);
        }
    }
    ImageBuf::from_vec(data, h, w, c)
}

fn interleave_u8<T: Scalar>(img: &ImageBuf<T>) -> Vec<u8> {
    let n = img.plane_len();
    let c = img.channels();
    let mut out = vec![0u8; n * c];
    for ch in 0..c {
        let plane = img.plane(ch);
        for i in 0..n {
            out[i * c + ch] = quantize_u8(plane[i]);
        }
    }
    out
}

fn encode_png<T: Scalar>(img: &ImageBuf<T>) -> Result<Vec<u8>> {
    let raw = interleave_u8(img);
    let (w, h) = (img.width() as u32, img.height() as u32);
    let dynimg = match img.channels() {
        1 => DynamicImage::ImageLuma8(
            image::GrayImage::from_raw(w, h, raw).expect("buffer sized for dims"),
        ),
        _ => DynamicImage::ImageRgb8(
            image::RgbImage::from_raw(w, h, raw).expect("buffer sized for dims"),
        ),
    };
    let mut bytes = Vec::new();
    dynimg
        .write_to(&mut std::io::Cursor::new(&mut bytes), ImageFormat::Png)
        .map_err(|e| Error::Format(format!("png encode: {e}")))?;
    Ok(bytes)
}

fn encode_pnm<T: Scalar>(img: &ImageBuf<T>, ext: &str) -> Result<Vec<u8>> {
    match (ext, img.channels()) {
        ("pgm", 1) | ("ppm", 3) | ("pnm", _) => {}
        ("pgm", c) => {
            return Err(Error::UnsupportedFormat(format!(
                "pgm holds 1 channel, image has {c}"
            )))
        }
        ("ppm", c) => {
            return Err(Error::UnsupportedFormat(format!(
                "ppm holds 3 channels, image has {c}"
            )))
        }
        _ => unreachable!(),
    }
    let raw = interleave_u8(img);
    // Binary PNM is simple enough to emit directly.
    let mut bytes = Vec::with_capacity(raw.len() + 32);
    let magic = if img.channels() == 1 { "P5" } else { "P6" };
    bytes.extend_from_slice(
        format!("{magic}\n{} {}\n255\n", img.width(), img.height()).as_bytes(),
    );
    bytes.extend_from_slice(&raw);
    Ok(bytes)
}

fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty());
    let mut tmp = match dir {
        Some(d) => {
            std::fs::create_dir_all(d)?;
            tempfile::NamedTempFile::new_in(d)?
        }
        None => tempfile::NamedTempFile::new_in(".")?,
    };
    tmp.write_all(bytes)?;
    tmp.flush()?;
    tmp.persist(path)
        .map_err(|e| Error::Io(e.error))?;
    Ok(())
}
