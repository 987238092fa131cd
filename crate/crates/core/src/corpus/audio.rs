//! 16-bit mono PCM in NIST SPHERE or RIFF WAVE containers.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::frames::AudioBuffer;

const SPHERE_MAGIC: &[u8] = b"NIST_1A";
const SPHERE_HEADER_LEN: usize = 1024;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ByteOrder {
    Little,
    Big,
}

pub fn read_audio(path: impl AsRef<Path>) -> Result<AudioBuffer> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::from(e).in_file(path))?;
    decode_audio(&bytes).map_err(|e| e.in_file(path))
}

/// Decodes a SPHERE or WAVE byte stream, picking the format by magic bytes.
pub fn decode_audio(bytes: &[u8]) -> Result<AudioBuffer> {
    if bytes.is_empty() {
        return Err(Error::EmptySignal("file has no content".into()));
    }
    if bytes.starts_with(SPHERE_MAGIC) {
        decode_sphere(bytes)
    } else if bytes.starts_with(b"RIFF") {
        decode_wav(bytes)
    } else {
        Err(Error::UnsupportedFormat(
            "expected NIST_1A or RIFF magic".into(),
        ))
    }
}

fn pcm_to_buffer(data: &[u8], order: ByteOrder, rate: u32) -> Result<AudioBuffer> {
    let samples = data
        .chunks_exact(2)
        .map(|b| {
            let v = match order {
                ByteOrder::Little => i16::from_le_bytes([b[0], b[1]]),
                ByteOrder::Big => i16::from_be_bytes([b[0], b[1]]),
            };
            v as f64 / 32768.0
        })
        .collect();
    AudioBuffer::new(samples, rate)
}

fn quantize(x: f64) -> i16 {
    (x * 32768.0).round().clamp(-32768.0, 32767.0) as i16
}

#[derive(Debug, Default)]
struct SphereHeader {
    header_len: usize,
    sample_rate: Option<u32>,
    sample_count: Option<usize>,
    channel_count: u32,
    sample_n_bytes: Option<u32>,
    byte_format: Option<String>,
    coding: Option<String>,
}

fn parse_sphere_header(bytes: &[u8]) -> Result<SphereHeader> {
    let corrupt = |m: &str| Error::CorruptFile(format!("SPHERE header: {m}"));
    let head_end = bytes.len().min(SPHERE_HEADER_LEN.max(64));
    let text = String::from_utf8_lossy(&bytes[..head_end]);
    let mut lines = text.lines();
    lines.next(); // NIST_1A
    let header_len: usize = lines
        .next()
        .and_then(|l| l.trim().parse().ok())
        .ok_or_else(|| corrupt("missing header length"))?;
    if header_len < 16 || header_len > bytes.len() {
        return Err(corrupt("header length exceeds file"));
    }
    let text = String::from_utf8_lossy(&bytes[..header_len]);
    let mut header = SphereHeader {
        header_len,
        channel_count: 1,
        ..Default::default()
    };
    let mut ended = false;
    for line in text.lines().skip(2) {
        let line = line.trim();
        if line == "end_head" {
            ended = true;
            break;
        }
        if line.is_empty() || line.starts_with(';') {
            continue;
        }
        let mut parts = line.splitn(3, char::is_whitespace);
        let (Some(key), Some(kind), value) = (parts.next(), parts.next(), parts.next()) else {
            continue;
        };
        let value = value.unwrap_or("").trim();
        let int = || -> Result<i64> {
            value
                .parse()
                .map_err(|_| corrupt(&format!("field {key} is not an integer")))
        };
        match key {
            "sample_rate" => {
                let v = if kind == "-r" {
                    value
                        .parse::<f64>()
                        .map_err(|_| corrupt("bad sample_rate"))?
                        .round() as i64
                } else {
                    int()?
                };
                header.sample_rate =
                    Some(u32::try_from(v).map_err(|_| corrupt("bad sample_rate"))?);
            }
            "sample_count" => {
                header.sample_count =
                    Some(usize::try_from(int()?).map_err(|_| corrupt("bad sample_count"))?)
            }
            "channel_count" => {
                header.channel_count =
                    u32::try_from(int()?).map_err(|_| corrupt("bad channel_count"))?
            }
            "sample_n_bytes" => {
                header.sample_n_bytes =
                    Some(u32::try_from(int()?).map_err(|_| corrupt("bad sample_n_bytes"))?)
            }
            "sample_byte_format" => header.byte_format = Some(value.to_string()),
            "sample_coding" => header.coding = Some(value.to_string()),
            _ => {}
        }
    }
    if !ended {
        return Err(corrupt("missing end_head"));
    }
    Ok(header)
}

fn decode_sphere(bytes: &[u8]) -> Result<AudioBuffer> {
    let h = parse_sphere_header(bytes)?;
    if let Some(coding) = &h.coding {
        if !coding.starts_with("pcm") || coding.contains("shorten") {
            return Err(Error::UnsupportedFormat(format!(
                "SPHERE sample_coding {coding}"
            )));
        }
    }
    if h.channel_count != 1 {
        return Err(Error::UnsupportedChannels(h.channel_count));
    }
    match h.sample_n_bytes {
        Some(2) => {}
        Some(n) => {
            return Err(Error::UnsupportedFormat(format!(
                "{}-bit SPHERE samples",
                n * 8
            )))
        }
        None => {
            return Err(Error::CorruptFile(
                "SPHERE header lacks sample_n_bytes".into(),
            ))
        }
    }
    let order = match h.byte_format.as_deref() {
        Some("01") | None => ByteOrder::Little,
        Some("10") => ByteOrder::Big,
        Some(other) => {
            return Err(Error::UnsupportedFormat(format!(
                "sample_byte_format {other}"
            )))
        }
    };
    let rate = h
        .sample_rate
        .ok_or_else(|| Error::CorruptFile("SPHERE header lacks sample_rate".into()))?;
    let payload = &bytes[h.header_len..];
    let count = h.sample_count.unwrap_or(payload.len() / 2);
    let needed = count * 2;
    if payload.len() < needed {
        return Err(Error::CorruptFile(format!(
            "SPHERE payload has {} bytes, header promises {needed}",
            payload.len()
        )));
    }
    pcm_to_buffer(&payload[..needed], order, rate)
}

/// SPHERE encoding with a 1024-byte header.
pub fn encode_sphere(buffer: &AudioBuffer, order: ByteOrder) -> Vec<u8> {
    let fmt = match order {
        ByteOrder::Little => "01",
        ByteOrder::Big => "10",
    };
    let text = format!(
        "NIST_1A\n   1024\nsample_count -i {}\nsample_rate -i {}\nchannel_count -i 1\n\
         sample_n_bytes -i 2\nsample_byte_format -s2 {fmt}\nsample_coding -s3 pcm\nend_head\n",
        buffer.len(),
        buffer.sample_rate_hz()
    );
    let mut out = text.into_bytes();
    out.resize(SPHERE_HEADER_LEN, b' ');
    for &x in buffer.samples() {
        let v = quantize(x);
        out.extend_from_slice(&match order {
            ByteOrder::Little => v.to_le_bytes(),
            ByteOrder::Big => v.to_be_bytes(),
        });
    }
    out
}

fn le_u16(b: &[u8]) -> u16 {
    u16::from_le_bytes([b[0], b[1]])
}

fn le_u32(b: &[u8]) -> u32 {
    u32::from_le_bytes([b[0], b[1], b[2], b[3]])
}

fn decode_wav(bytes: &[u8]) -> Result<AudioBuffer> {
    if bytes.len() < 12 || &bytes[8..12] != b"WAVE" {
        return Err(Error::UnsupportedFormat("RIFF file is not WAVE".into()));
    }
    let mut pos = 12;
    let mut fmt: Option<(u16, u16, u32, u16)> = None;
    while pos + 8 <= bytes.len() {
        let id = &bytes[pos..pos + 4];
        let size = le_u32(&bytes[pos + 4..pos + 8]) as usize;
        let body = pos + 8;
        match id {
            b"fmt " => {
                if size < 16 || body + 16 > bytes.len() {
                    return Err(Error::CorruptFile("short fmt chunk".into()));
                }
                let b = &bytes[body..];
                fmt = Some((
                    le_u16(&b[0..]),
                    le_u16(&b[2..]),
                    le_u32(&b[4..]),
                    le_u16(&b[14..]),
                ));
            }
            b"data" => {
                let (format, channels, rate, bits) =
                    fmt.ok_or_else(|| Error::CorruptFile("data chunk before fmt".into()))?;
                // 0xFFFE is WAVE_FORMAT_EXTENSIBLE; accepted when the sample layout is 16-bit.
                if format != 1 && format != 0xFFFE {
                    return Err(Error::UnsupportedFormat(format!(
                        "WAVE format tag {format}"
                    )));
                }
                if channels != 1 {
                    return Err(Error::UnsupportedChannels(channels as u32));
                }
                if bits != 16 {
                    return Err(Error::UnsupportedFormat(format!("{bits}-bit WAVE samples")));
                }
                if body + size > bytes.len() {
                    return Err(Error::CorruptFile(format!(
                        "data chunk claims {size} bytes, {} present",
                        bytes.len() - body
                    )));
                }
                return pcm_to_buffer(&bytes[body..body + size], ByteOrder::Little, rate);
            }
            _ => {}
        }
        pos = body + size + (size & 1);
    }
    Err(Error::CorruptFile("WAVE file has no data chunk".into()))
}

/// Canonical 44-byte-header 16-bit mono WAVE.
pub fn encode_wav(buffer: &AudioBuffer) -> Vec<u8> {
    let data_len = (buffer.len() * 2) as u32;
    let rate = buffer.sample_rate_hz();
    let mut out = Vec::with_capacity(44 + data_len as usize);
    out.extend_from_slice(b"RIFF");
    out.extend_from_slice(&(36 + data_len).to_le_bytes());
    out.extend_from_slice(b"WAVEfmt ");
    out.extend_from_slice(&16u32.to_le_bytes());
    out.extend_from_slice(&1u16.to_le_bytes());
    out.extend_from_slice(&1u16.to_le_bytes());
    out.extend_from_slice(&rate.to_le_bytes());
    out.extend_from_slice(&(rate * 2).to_le_bytes());
    out.extend_from_slice(&2u16.to_le_bytes());
    out.extend_from_slice(&16u16.to_le_bytes());
    out.extend_from_slice(b"data");
    out.extend_from_slice(&data_len.to_le_bytes());
    for &x in buffer.samples() {
        out.extend_from_slice(&quantize(x).to_le_bytes());
    }
    out
}

pub fn write_wav(path: impl AsRef<Path>, buffer: &AudioBuffer) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, encode_wav(buffer)).map_err(|e| Error::from(e).in_file(path))
}
