//! Text and binary file formats.

use std::fmt::Write as _;

use thiserror::Error;

use crate::golay::{LengthKind, LengthSet};
use crate::hadamard::PMMatrix;
use crate::seq::{parse_token, QSeq};
use crate::signed_perm::{SPSeq, SignedPerm};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}, column {column}: {msg}")]
pub struct CodecError {
    pub line: usize,
    pub column: usize,
    pub msg: String,
}

impl CodecError {
    pub fn new(line: usize, column: usize, msg: impl Into<String>) -> Self {
        CodecError { line, column, msg: msg.into() }
    }
}

fn header_fields<'a>(line_no: usize, rest: &'a str, keys: &[&str]) -> Result<Vec<&'a str>, CodecError> {
    let mut out = vec![""; keys.len()];
    for field in rest.split_whitespace() {
        let (k, v) = field
            .split_once('=')
            .ok_or_else(|| CodecError::new(line_no, 1, format!("bad header field `{field}`")))?;
        let idx = keys
            .iter()
            .position(|&key| key == k)
            .ok_or_else(|| CodecError::new(line_no, 1, format!("unknown header field `{k}`")))?;
        out[idx] = v;
    }
    if let Some(k) = keys.iter().zip(&out).find(|(_, v)| v.is_empty()).map(|(k, _)| k) {
        return Err(CodecError::new(line_no, 1, format!("header misses `{k}`")));
    }
    Ok(out)
}

fn parse_usize(line: usize, v: &str) -> Result<usize, CodecError> {
    v.parse().map_err(|_| CodecError::new(line, 1, format!("bad number `{v}`")))
}

/// Parses one data line of comma-separated tokens, reporting 1-based character columns.
fn parse_seq_line(line_no: usize, line: &str) -> Result<QSeq, CodecError> {
    let data = line.split('#').next().unwrap_or("");
    if data.trim().is_empty() {
        return Ok(QSeq::empty());
    }
    let mut entries = Vec::new();
    let mut col = 1;
    for raw in data.split(',') {
        let tok: String = raw.chars().filter(|c| !c.is_whitespace()).collect();
        let lead = raw.chars().take_while(|c| c.is_whitespace()).count();
        let value = parse_token(&tok)
            .ok_or_else(|| CodecError::new(line_no, col + lead, format!("bad token `{tok}`")))?;
        entries.push(value);
        col += raw.chars().count() + 1;
    }
    Ok(QSeq::new(entries))
}

fn is_comment(line: &str) -> bool {
    let t = line.trim_start();
    t.starts_with('#') && !t.starts_with("#gcs")
}

/// Writes one record; empty sequences become empty lines.
pub fn write_gcs(seqs: &[QSeq]) -> String {
    let n = seqs.iter().map(|s| s.len()).max().unwrap_or(0);
    let mut out = format!("#gcs n={n} L={}\n", seqs.len());
    for s in seqs {
        let _ = writeln!(out, "{s}");
    }
    out
}

/// Writes several records with leading comment lines.
pub fn write_gcs_records(comments: &[String], records: &[Vec<QSeq>]) -> String {
    let mut out = String::new();
    for c in comments {
        let _ = writeln!(out, "# {c}");
    }
    for r in records {
        out.push_str(&write_gcs(r));
    }
    out
}

/// Parses every `#gcs` record in a file.
///
/// Inside a record, comment lines are skipped and an empty line is an empty sequence;
/// between records blank lines are ignored.
pub fn parse_gcs_records(text: &str) -> Result<Vec<Vec<QSeq>>, CodecError> {
    let mut records = Vec::new();
    let mut lines = text.lines().enumerate().map(|(k, l)| (k + 1, l)).peekable();
    while let Some((no, line)) = lines.next() {
        let t = line.trim();
        if t.is_empty() || is_comment(t) {
            continue;
        }
        let rest = t
            .strip_prefix("#gcs")
            .ok_or_else(|| CodecError::new(no, 1, "expected `#gcs` header"))?;
        let f = header_fields(no, rest, &["n", "L"])?;
        let (n, count) = (parse_usize(no, f[0])?, parse_usize(no, f[1])?);
        let mut seqs = Vec::with_capacity(count);
        while seqs.len() < count {
            let (lno, l) = lines
                .next()
                .ok_or_else(|| CodecError::new(no, 1, format!("record declares {count} sequences, found {}", seqs.len())))?;
            if is_comment(l) {
                continue;
            }
            if l.trim_start().starts_with("#gcs") {
                return Err(CodecError::new(lno, 1, "record ended early"));
            }
            seqs.push(parse_seq_line(lno, l)?);
        }
        let longest = seqs.iter().map(|s| s.len()).max().unwrap_or(0);
        if longest != n {
            return Err(CodecError::new(no, 1, format!("header says n={n}, longest sequence has {longest}")));
        }
        records.push(seqs);
    }
    Ok(records)
}

/// Parses a file holding exactly one record.
pub fn parse_sequences(text: &str) -> Result<Vec<QSeq>, CodecError> {
    let mut r = parse_gcs_records(text)?;
    match r.len() {
        1 => Ok(r.pop().unwrap()),
        k => Err(CodecError::new(1, 1, format!("expected one record, found {k}"))),
    }
}

/// `#spseq v= n=` followed by one entry per line, `0` or `perm:…;sign:…`.
pub fn write_spseq(c: &SPSeq) -> String {
    let mut out = format!("#spseq v={} n={}\n", c.order(), c.len());
    for e in c.entries() {
        match e {
            Some(x) => writeln!(out, "{x}"),
            None => writeln!(out, "0"),
        }
        .expect("write to string");
    }
    out
}

fn parse_csv<T: std::str::FromStr>(line: usize, s: &str, what: &str) -> Result<Vec<T>, CodecError> {
    s.split(',')
        .map(|t| t.trim().parse().map_err(|_| CodecError::new(line, 1, format!("bad {what} `{t}`"))))
        .collect()
}

pub fn parse_spseq(text: &str) -> Result<SPSeq, CodecError> {
    let mut lines = text.lines().enumerate().map(|(k, l)| (k + 1, l.trim())).filter(|(_, l)| !l.is_empty());
    let (no, first) = lines.next().ok_or_else(|| CodecError::new(1, 1, "empty input"))?;
    let rest = first.strip_prefix("#spseq").ok_or_else(|| CodecError::new(no, 1, "expected `#spseq` header"))?;
    let f = header_fields(no, rest, &["v", "n"])?;
    let (v, n) = (parse_usize(no, f[0])?, parse_usize(no, f[1])?);
    let mut entries = Vec::with_capacity(n);
    for (no, l) in lines.filter(|(_, l)| !l.starts_with('#')) {
        if l == "0" {
            entries.push(None);
            continue;
        }
        let (perm, sign) = l
            .strip_prefix("perm:")
            .and_then(|r| r.split_once(";sign:"))
            .ok_or_else(|| CodecError::new(no, 1, "expected `0` or `perm:…;sign:…`"))?;
        let x = SignedPerm::new(parse_csv(no, perm, "image")?, parse_csv(no, sign, "sign")?)
            .map_err(|e| CodecError::new(no, 1, e.to_string()))?;
        entries.push(Some(x));
    }
    if entries.len() != n {
        return Err(CodecError::new(no, 1, format!("header says n={n}, found {} entries", entries.len())));
    }
    SPSeq::new(v, entries).map_err(|e| CodecError::new(no, 1, e.to_string()))
}

/// `order <n> [block <v>]` then rows of `+`/`-`.
pub fn write_matrix_text(h: &PMMatrix) -> String {
    let n = h.order();
    let mut out = match h.block() {
        Some(v) => format!("order {n} block {v}\n"),
        None => format!("order {n}\n"),
    };
    out.reserve(n * (n + 1));
    for r in 0..n {
        out.extend((0..n).map(|c| if h.get(r, c) > 0 { '+' } else { '-' }));
        out.push('\n');
    }
    out
}

pub fn parse_matrix_text(text: &str) -> Result<PMMatrix, CodecError> {
    let mut lines = text.lines().enumerate().map(|(k, l)| (k + 1, l.trim_end()));
    let (no, first) = lines.next().ok_or_else(|| CodecError::new(1, 1, "empty input"))?;
    let f: Vec<&str> = first.split_whitespace().collect();
    let (n, block) = match f.as_slice() {
        ["order", n] => (parse_usize(no, n)?, None),
        ["order", n, "block", v] => (parse_usize(no, n)?, Some(parse_usize(no, v)?)),
        _ => return Err(CodecError::new(no, 1, "expected `order <n> [block <v>]`")),
    };
    let mut h = PMMatrix::ones(n).with_block(block);
    let mut r = 0;
    for (no, l) in lines {
        if l.is_empty() {
            continue;
        }
        if r == n {
            return Err(CodecError::new(no, 1, "more rows than the order"));
        }
        let chars: Vec<char> = l.chars().collect();
        if chars.len() != n {
            return Err(CodecError::new(no, 1, format!("row has {} entries, expected {n}", chars.len())));
        }
        for (c, ch) in chars.into_iter().enumerate() {
            match ch {
                '+' => {}
                '-' => h.set(r, c, -1),
                _ => return Err(CodecError::new(no, c + 1, format!("bad entry `{ch}`"))),
            }
        }
        r += 1;
    }
    if r != n {
        return Err(CodecError::new(no, 1, format!("found {r} rows, expected {n}")));
    }
    Ok(h)
}

const HMAT_MAGIC: &[u8; 4] = b"HMAT";
const GLS_MAGIC: &[u8; 4] = b"GLS1";

fn take<'a>(buf: &mut &'a [u8], k: usize) -> Result<&'a [u8], CodecError> {
    if buf.len() < k {
        return Err(CodecError::new(0, 0, "truncated binary file"));
    }
    let (h, t) = buf.split_at(k);
    *buf = t;
    Ok(h)
}

fn take_u64(buf: &mut &[u8]) -> Result<u64, CodecError> {
    Ok(u64::from_le_bytes(take(buf, 8)?.try_into().expect("8 bytes")))
}

/// `HMAT`, order and block size (0 for none) as little-endian `u64`, then packed row words.
pub fn write_hmat(h: &PMMatrix) -> Vec<u8> {
    let mut out = Vec::with_capacity(20 + 8 * h.words().len());
    out.extend_from_slice(HMAT_MAGIC);
    out.extend_from_slice(&(h.order() as u64).to_le_bytes());
    out.extend_from_slice(&(h.block().unwrap_or(0) as u64).to_le_bytes());
    for w in h.words() {
        out.extend_from_slice(&w.to_le_bytes());
    }
    out
}

pub fn read_hmat(mut buf: &[u8]) -> Result<PMMatrix, CodecError> {
    if take(&mut buf, 4)? != HMAT_MAGIC {
        return Err(CodecError::new(0, 0, "missing HMAT magic"));
    }
    let n = take_u64(&mut buf)? as usize;
    let block = take_u64(&mut buf)? as usize;
    let count = n.checked_mul(n.div_ceil(64)).ok_or_else(|| CodecError::new(0, 0, "order too large"))?;
    if buf.len() != 8 * count {
        return Err(CodecError::new(0, 0, format!("expected {count} row words, found {} bytes", buf.len())));
    }
    let words = buf.chunks_exact(8).map(|c| u64::from_le_bytes(c.try_into().expect("8 bytes"))).collect();
    PMMatrix::from_words(n, (block != 0).then_some(block), words)
        .ok_or_else(|| CodecError::new(0, 0, "padding bits set beyond the order"))
}

/// `GLS1`, kind tag and parameter, zero flag, one pad byte, bound, word count, raw words.
pub fn write_gls(s: &LengthSet) -> Vec<u8> {
    let (kind, k) = s.kind().tag();
    let mut out = Vec::with_capacity(24 + 8 * s.words().len());
    out.extend_from_slice(GLS_MAGIC);
    out.extend_from_slice(&[kind, k, s.has_zero() as u8, 0]);
    out.extend_from_slice(&s.bound().to_le_bytes());
    out.extend_from_slice(&(s.words().len() as u64).to_le_bytes());
    for w in s.words() {
        out.extend_from_slice(&w.to_le_bytes());
    }
    out
}

pub fn read_gls(mut buf: &[u8]) -> Result<LengthSet, CodecError> {
    if take(&mut buf, 4)? != GLS_MAGIC {
        return Err(CodecError::new(0, 0, "missing GLS1 magic"));
    }
    let t = take(&mut buf, 4)?;
    let kind = LengthKind::from_tag(t[0], t[1]).ok_or_else(|| CodecError::new(0, 0, "unknown kind tag"))?;
    let bound = take_u64(&mut buf)?;
    let count = take_u64(&mut buf)? as usize;
    if buf.len() != count.saturating_mul(8) {
        return Err(CodecError::new(0, 0, "word count does not match file size"));
    }
    let words = buf.chunks_exact(8).map(|c| u64::from_le_bytes(c.try_into().expect("8 bytes"))).collect();
    LengthSet::from_words(kind, bound, t[2] != 0, words).ok_or_else(|| CodecError::new(0, 0, "word count does not match bound"))
}

/// `n,rho,density` rows.
pub fn write_density_csv(rows: &[(u64, u64, f64)]) -> String {
    let mut out = String::from("n,rho,density\n");
    for (n, rho, d) in rows {
        writeln!(out, "{n},{rho},{d:.6}").expect("write to string");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    use crate::hadamard::sylvester;

    #[test]
    fn spseq_round_trip() {
        let c = SPSeq::new(2, vec![Some(SignedPerm::sp_i()), None, Some(SignedPerm::identity(2))]).unwrap();
        let text = write_spseq(&c);
        assert_eq!(text, "#spseq v=2 n=3\nperm:1,0;sign:-1,1\n0\nperm:0,1;sign:1,1\n");
        assert_eq!(parse_spseq(&text).unwrap(), c);
        assert!(parse_spseq("#spseq v=2 n=1\nperm:0,0;sign:1,1\n").is_err());
        assert!(parse_spseq("#spseq v=2 n=2\n0\n").is_err());
    }

    #[test]
    fn matrix_formats() {
        let h = sylvester(3).with_block(Some(4));
        let text = write_matrix_text(&h);
        assert!(text.starts_with("order 8 block 4\n++++++++\n+-+-+-+-\n"));
        assert_eq!(parse_matrix_text(&text).unwrap(), h);
        assert_eq!(read_hmat(&write_hmat(&h)).unwrap(), h);
        let e = parse_matrix_text("order 2\n++\n+x\n").unwrap_err();
        assert_eq!((e.line, e.column), (3, 2));
        let mut bin = write_hmat(&sylvester(2));
        bin.pop();
        assert!(read_hmat(&bin).is_err());
    }

    #[test]
    fn length_set_binary() {
        let mut s = LengthSet::from_values(LengthKind::Sk(2), 200, [0, 1, 5, 64, 200]);
        s.set_zero(true);
        let bin = write_gls(&s);
        assert_eq!(&bin[..4], b"GLS1");
        assert_eq!(read_gls(&bin).unwrap(), s);
        assert!(read_gls(&bin[..bin.len() - 8]).is_err());
    }

    #[test]
    fn density_csv() {
        assert_eq!(write_density_csv(&[(10, 7, 0.7)]), "n,rho,density\n10,7,0.700000\n");
    }

    #[test]
    fn sequence_round_trip() {
        let seqs: Vec<QSeq> = ["1,-1,i", "", "-i,0"].iter().map(|s| s.parse().unwrap()).collect();
        let text = write_gcs(&seqs);
        assert_eq!(text, "#gcs n=3 L=3\n1,-1,i\n\n-i,0\n");
        assert_eq!(parse_sequences(&text).unwrap(), seqs);
    }

    #[test]
    fn comments_and_whitespace() {
        let text = "# made by hand\n\n#gcs n=2 L=2\n 1 , -1 # first\n# between\ni,i\n";
        let s = parse_sequences(text).unwrap();
        assert_eq!(s[0], QSeq::from_ints(&[1, -1]));
        assert_eq!(s[1].to_string(), "i,i");
    }

    #[test]
    fn bad_token_position() {
        let e = parse_sequences("#gcs n=3 L=1\n1,2,1\n").unwrap_err();
        assert_eq!((e.line, e.column), (2, 3));
        assert!(e.msg.contains("`2`"));
    }

    #[test]
    fn header_checks() {
        assert!(parse_sequences("#gcs n=3 L=1\n1,1\n").is_err());
        assert!(parse_sequences("#gcs n=2 L=2\n1,1\n").is_err());
        assert!(parse_sequences("1,1\n").is_err());
        assert!(parse_sequences("#gcs L=1\n1\n").is_err());
    }
}
