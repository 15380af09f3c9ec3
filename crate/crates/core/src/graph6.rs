//! graph6 interchange format.
//!
//! The header is `n + 63` for `n <= 62`, otherwise `'~'` followed by three
//! bytes carrying `n` in 18 bits. The upper triangle is read column by
//! column (`x(0,1), x(0,2), x(1,2), x(0,3), ...`), packed six bits per byte
//! with the most significant bit first and offset by 63. Padding bits are
//! zero.

use crate::error::{Error, Result};
use crate::graph::{Graph, MAX_ORDER};

pub fn encode(g: &Graph) -> String {
    let n = g.order();
    let mut out = Vec::with_capacity(4 + (n * n.saturating_sub(1) / 2).div_ceil(6));
    if n <= 62 {
        out.push(n as u8 + 63);
    } else {
        out.push(126);
        out.extend([(n >> 12) & 63, (n >> 6) & 63, n & 63].map(|c| c as u8 + 63));
    }
    let mut acc = 0u8;
    let mut nbits = 0;
    for j in 1..n {
        for i in 0..j {
            acc = (acc << 1) | g.has_edge(i, j) as u8;
            nbits += 1;
            if nbits == 6 {
                out.push(acc + 63);
                acc = 0;
                nbits = 0;
            }
        }
    }
    if nbits > 0 {
        out.push((acc << (6 - nbits)) + 63);
    }
    // every byte is in 63..=126
    String::from_utf8(out).expect("graph6 output is ASCII")
}

pub fn decode(code: &[u8]) -> Result<Graph> {
    if let Some(&b) = code.iter().find(|&&b| !(63..=126).contains(&b)) {
        return Err(Error::Graph6(format!(
            "byte {b:#04x} outside the printable range 63..=126"
        )));
    }
    let (n, body) = match code {
        [] => return Err(Error::Graph6("empty input".into())),
        [126, 126, ..] => {
            return Err(Error::Graph6(
                "orders above 258047 are not supported".into(),
            ))
        }
        [126, rest @ ..] => {
            if rest.len() < 3 {
                return Err(Error::Graph6("truncated order header".into()));
            }
            let n = rest[..3]
                .iter()
                .fold(0usize, |acc, &b| (acc << 6) | (b - 63) as usize);
            if n <= 62 {
                return Err(Error::Graph6(format!(
                    "order {n} must use the short header"
                )));
            }
            (n, &rest[3..])
        }
        [h, rest @ ..] => ((h - 63) as usize, rest),
    };
    if n > MAX_ORDER {
        return Err(Error::OrderOverflow(n));
    }
    let nbits = n * n.saturating_sub(1) / 2;
    let need = nbits.div_ceil(6);
    if body.len() < need {
        return Err(Error::Graph6(format!(
            "truncated bit stream: {} bytes, expected {need}",
            body.len()
        )));
    }
    if body.len() > need {
        return Err(Error::Graph6(format!(
            "{} trailing bytes after the bit stream",
            body.len() - need
        )));
    }
    let mut g = Graph::empty(n)?;
    let mut idx = 0;
    for j in 1..n {
        for i in 0..j {
            let byte = body[idx / 6] - 63;
            if byte & (1 << (5 - idx % 6)) != 0 {
                g.add_edge(i, j);
            }
            idx += 1;
        }
    }
    if nbits % 6 != 0 {
        let last = body[need - 1] - 63;
        if last & ((1u8 << (6 - nbits % 6)) - 1) != 0 {
            return Err(Error::Graph6("nonzero padding bits".into()));
        }
    }
    Ok(g)
}

pub fn decode_str(code: &str) -> Result<Graph> {
    decode(code.trim_end_matches(['\n', '\r']).as_bytes())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_codes() {
        assert_eq!(decode(b"Bw").unwrap(), Graph::complete(3).unwrap());
        assert_eq!(encode(&Graph::empty(1).unwrap()), "@");
        assert_eq!(encode(&Graph::empty(0).unwrap()), "?");
        // petgraph's reference pentagon-ish example
        let g = Graph::from_edges(5, &[(0, 2), (0, 4), (1, 3), (3, 4)]).unwrap();
        assert_eq!(encode(&g), "DQc");
    }

    #[test]
    fn long_header() {
        let g = Graph::complete(64).unwrap();
        let code = encode(&g);
        assert!(code.starts_with("~?@?"));
        assert_eq!(decode(code.as_bytes()).unwrap(), g);
        let g63 = Graph::path(63).unwrap();
        assert_eq!(decode(encode(&g63).as_bytes()).unwrap(), g63);
    }

    #[test]
    fn malformed() {
        assert!(matches!(decode(b""), Err(Error::Graph6(_))));
        assert!(matches!(decode(b"B"), Err(Error::Graph6(_))));
        assert!(matches!(decode(b"Bww"), Err(Error::Graph6(_))));
        assert!(matches!(decode(b"B\x01"), Err(Error::Graph6(_))));
        assert!(matches!(decode(b"Bx"), Err(Error::Graph6(_))));
        assert!(matches!(decode(b"~?A"), Err(Error::Graph6(_))));
        assert_eq!(decode(b"~?@@"), Err(Error::OrderOverflow(65)));
    }
}
