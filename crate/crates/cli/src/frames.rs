//! Hex frame files: one frame of bits per line, most significant nibble
//! first, the final nibble zero-padded when the bit count is not a
//! multiple of four.

/// Renders one frame as uppercase hex digits.
pub fn to_hex_line(bits: &[bool]) -> String {
    let mut line = String::with_capacity(bits.len().div_ceil(4));
    for chunk in bits.chunks(4) {
        let mut nibble = 0u8;
        for (i, &b) in chunk.iter().enumerate() {
            if b {
                nibble |= 1 << (3 - i);
            }
        }
        line.push(char::from_digit(u32::from(nibble), 16).unwrap().to_ascii_uppercase());
    }
    line
}

/// Parses one frame of exactly `bits` bits from a hex line.
pub fn parse_hex_line(line: &str, bits: usize) -> Result<Vec<bool>, String> {
    let line = line.trim();
    let want = bits.div_ceil(4);
    if line.len() != want {
        return Err(format!("expected {want} hex digits for {bits} bits, got {}", line.len()));
    }
    let mut out = Vec::with_capacity(bits);
    for c in line.chars() {
        let nibble =
            c.to_digit(16).ok_or_else(|| format!("invalid hex digit '{c}'"))? as u8;
        for i in 0..4 {
            out.push(nibble & (1 << (3 - i)) != 0);
        }
    }
    for &pad in &out[bits..] {
        if pad {
            return Err("padding bits past the frame length must be zero".into());
        }
    }
    out.truncate(bits);
    Ok(out)
}

/// Parses a whole frame file, skipping blank lines.
pub fn parse_frames(text: &str, bits: usize) -> Result<Vec<Vec<bool>>, String> {
    let mut frames = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        frames
            .push(parse_hex_line(line, bits).map_err(|e| format!("line {}: {e}", idx + 1))?);
    }
    if frames.is_empty() {
        return Err("no frames in file".into());
    }
    Ok(frames)
}

/// Renders a frame file.
pub fn render_frames(frames: &[Vec<bool>]) -> String {
    let mut text = String::new();
    for f in frames {
        text.push_str(&to_hex_line(f));
        text.push('\n');
    }
    text
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hex_lines_round_trip() {
        let bits: Vec<bool> = (0..64).map(|i| i % 3 == 0).collect();
        let line = to_hex_line(&bits);
        assert_eq!(line.len(), 16);
        assert_eq!(parse_hex_line(&line, 64).unwrap(), bits);
    }

    #[test]
    fn msb_first_nibbles() {
        assert_eq!(to_hex_line(&[true, false, false, false]), "8");
        assert_eq!(to_hex_line(&[false, false, false, true]), "1");
        assert_eq!(to_hex_line(&[true; 8]), "FF");
        assert_eq!(parse_hex_line("A", 4).unwrap(), vec![true, false, true, false]);
    }

    #[test]
    fn odd_lengths_pad_the_last_nibble() {
        let bits = vec![true, true, false, false, true, true];
        let line = to_hex_line(&bits);
        assert_eq!(line, "CC");
        assert_eq!(parse_hex_line(&line, 6).unwrap(), bits);
        // Nonzero padding is rejected, not silently dropped.
        assert!(parse_hex_line("CD", 6).is_err());
    }

    #[test]
    fn frame_files_skip_blanks_and_name_bad_lines() {
        let frames = parse_frames("F0\n\n0F\n", 8).unwrap();
        assert_eq!(frames.len(), 2);
        let err = parse_frames("F0\nG0\n", 8).unwrap_err();
        assert!(err.contains("line 2"), "{err}");
        assert!(parse_frames("\n", 8).is_err());
    }

    #[test]
    fn wrong_length_lines_are_rejected() {
        assert!(parse_hex_line("FFF", 8).is_err());
        assert!(parse_hex_line("F", 8).is_err());
    }
}
