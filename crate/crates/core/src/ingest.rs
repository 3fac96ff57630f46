//! Streaming extraction of article bodies from a wiki-style XML dump, plus the
//! rule-based sentence splitter and tokenizer applied to them.
//!
//! The dump is not parsed as XML. The scanner only looks for `<title>` and
//! `<text ...>` regions; everything else (infoboxes, categories, headings,
//! revision metadata) is skipped as literal text. Bodies are taken verbatim
//! apart from decoding XML character entities.

use std::collections::VecDeque;
use std::io::{BufRead, Write};

use encoding_rs::Encoding;

use crate::error::{Error, Result};
use crate::normalize::{NormalizedSentence, StopwordSet, NORMALIZATION_VERSION};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawDocument {
    pub title: String,
    pub body: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TokenizedDocument {
    pub title: String,
    pub sentences: Vec<Vec<String>>,
}

impl TokenizedDocument {
    pub fn from_raw(doc: &RawDocument) -> Self {
        let sentences = segment_sentences(&doc.body)
            .iter()
            .map(|s| tokenize(s))
            .filter(|t| !t.is_empty())
            .collect();
        TokenizedDocument {
            title: doc.title.clone(),
            sentences,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum ScanState {
    Outside,
    InTitle,
    /// Inside `<text` but before the `>` closing the open tag.
    InTextTag,
    InText,
}

/// Iterator over the documents of a dump.
///
/// Memory use is bounded by the largest single document (and the longest
/// physical line), never by the size of the dump.
pub struct DocumentStream<R> {
    reader: R,
    encoding: &'static Encoding,
    state: ScanState,
    title: Option<String>,
    title_buf: String,
    body: String,
    line: Vec<u8>,
    pending: VecDeque<RawDocument>,
    emitted: usize,
    warnings: usize,
    done: bool,
}

/// Stream the documents of a UTF-8 dump.
pub fn extract_documents<R: BufRead>(dump: R) -> DocumentStream<R> {
    DocumentStream::new(dump, encoding_rs::UTF_8)
}

/// Look up an ASCII-compatible encoding by WHATWG label ("utf-8", "latin1", ...).
pub fn encoding_for_label(label: &str) -> Result<&'static Encoding> {
    let enc = Encoding::for_label(label.trim().as_bytes())
        .ok_or_else(|| Error::Input(format!("unknown encoding {label:?}")))?;
    if !enc.is_ascii_compatible() {
        return Err(Error::Input(format!(
            "encoding {} is not ASCII-compatible and cannot be scanned line by line",
            enc.name()
        )));
    }
    Ok(enc)
}

impl<R: BufRead> DocumentStream<R> {
    pub fn new(reader: R, encoding: &'static Encoding) -> Self {
        DocumentStream {
            reader,
            encoding,
            state: ScanState::Outside,
            title: None,
            title_buf: String::new(),
            body: String::new(),
            line: Vec::new(),
            pending: VecDeque::new(),
            emitted: 0,
            warnings: 0,
            done: false,
        }
    }

    /// Number of recoverable problems seen so far (unterminated regions).
    pub fn warnings(&self) -> usize {
        self.warnings
    }

    fn finish_document(&mut self) -> RawDocument {
        self.emitted += 1;
        let title = match &self.title {
            Some(t) if !t.is_empty() => t.clone(),
            _ => format!("doc-{}", self.emitted),
        };
        let body = unescape_xml(&std::mem::take(&mut self.body));
        RawDocument { title, body }
    }

    /// Scan one decoded line. Completed documents are pushed to `out`.
    fn scan(&mut self, mut rest: &str, out: &mut VecDeque<RawDocument>) {
        while !rest.is_empty() {
            match self.state {
                ScanState::Outside => {
                    let title_at = rest.find("<title>");
                    let text_at = find_text_open(rest);
                    match (title_at, text_at) {
                        (Some(t), Some(x)) if t < x => {
                            rest = &rest[t + "<title>".len()..];
                            self.title_buf.clear();
                            self.state = ScanState::InTitle;
                        }
                        (_, Some(x)) => {
                            rest = &rest[x + "<text".len()..];
                            self.state = ScanState::InTextTag;
                        }
                        (Some(t), None) => {
                            rest = &rest[t + "<title>".len()..];
                            self.title_buf.clear();
                            self.state = ScanState::InTitle;
                        }
                        (None, None) => return,
                    }
                }
                ScanState::InTitle => match rest.find("</title>") {
                    Some(end) => {
                        self.title_buf.push_str(&rest[..end]);
                        rest = &rest[end + "</title>".len()..];
                        self.title = Some(clean_title(&self.title_buf));
                        self.state = ScanState::Outside;
                    }
                    None => {
                        self.title_buf.push_str(rest);
                        return;
                    }
                },
                ScanState::InTextTag => match rest.find('>') {
                    Some(end) => {
                        let self_closing = rest[..end].ends_with('/');
                        rest = &rest[end + 1..];
                        if self_closing {
                            out.push_back(self.finish_document());
                            self.state = ScanState::Outside;
                        } else {
                            self.body.clear();
                            self.state = ScanState::InText;
                        }
                    }
                    None => return,
                },
                ScanState::InText => match rest.find("</text>") {
                    Some(end) => {
                        self.body.push_str(&rest[..end]);
                        rest = &rest[end + "</text>".len()..];
                        out.push_back(self.finish_document());
                        self.state = ScanState::Outside;
                    }
                    None => {
                        self.body.push_str(rest);
                        return;
                    }
                },
            }
        }
    }
}

impl<R: BufRead> Iterator for DocumentStream<R> {
    type Item = Result<RawDocument>;

    fn next(&mut self) -> Option<Self::Item> {
        loop {
            if let Some(doc) = self.pending.pop_front() {
                return Some(Ok(doc));
            }
            if self.done {
                return None;
            }
            self.line.clear();
            let n = match self.reader.read_until(b'\n', &mut self.line) {
                Ok(n) => n,
                Err(e) => {
                    self.done = true;
                    return Some(Err(Error::Input(format!("reading dump: {e}"))));
                }
            };
            if n == 0 {
                self.done = true;
                if matches!(self.state, ScanState::InText | ScanState::InTextTag) {
                    self.warnings += 1;
                    log::warn!("dump ended inside an unterminated <text> region");
                    self.state = ScanState::Outside;
                    return Some(Ok(self.finish_document()));
                }
                return None;
            }
            let line = std::mem::take(&mut self.line);
            let (decoded, _) = self.encoding.decode_without_bom_handling(&line);
            let mut out = std::mem::take(&mut self.pending);
            self.scan(&decoded, &mut out);
            self.pending = out;
            self.line = line;
        }
    }
}

/// `<text` followed by `>`, `/` or whitespace, so `<textarea>` does not match.
fn find_text_open(s: &str) -> Option<usize> {
    let mut from = 0;
    while let Some(i) = s[from..].find("<text") {
        let at = from + i;
        match s[at + "<text".len()..].chars().next() {
            Some(c) if c == '>' || c == '/' || c.is_whitespace() => return Some(at),
            None => return Some(at),
            _ => from = at + 1,
        }
    }
    None
}

fn clean_title(raw: &str) -> String {
    unescape_xml(raw).split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Decode the predefined XML entities and numeric character references.
/// Unknown or malformed references are left untouched.
pub fn unescape_xml(s: &str) -> String {
    if !s.contains('&') {
        return s.to_owned();
    }
    let mut out = String::with_capacity(s.len());
    let mut rest = s;
    while let Some(amp) = rest.find('&') {
        out.push_str(&rest[..amp]);
        rest = &rest[amp..];
        let decoded = rest[1..]
            .find(';')
            .filter(|&semi| semi <= 10)
            .and_then(|semi| decode_entity(&rest[1..=semi]).map(|c| (c, semi + 2)));
        match decoded {
            Some((c, len)) => {
                out.push(c);
                rest = &rest[len..];
            }
            None => {
                out.push('&');
                rest = &rest[1..];
            }
        }
    }
    out.push_str(rest);
    out
}

fn decode_entity(name: &str) -> Option<char> {
    match name {
        "lt" => Some('<'),
        "gt" => Some('>'),
        "amp" => Some('&'),
        "quot" => Some('"'),
        "apos" => Some('\''),
        _ => {
            let num = name.strip_prefix('#')?;
            let code = match num.strip_prefix(['x', 'X']) {
                Some(hex) => u32::from_str_radix(hex, 16).ok()?,
                None => num.parse().ok()?,
            };
            char::from_u32(code)
        }
    }
}

fn is_closer(c: char) -> bool {
    matches!(c, '"' | '\'' | ')' | ']' | '\u{201d}' | '\u{2019}')
}

/// Split a body into sentences.
///
/// A sentence ends at `.`, `!` or `?` (optionally followed by more of those
/// and closing quotes or brackets) when what follows is whitespace and then an
/// uppercase letter, or the end of the text. Blank lines always end a
/// sentence. Returned sentences are trimmed and non-empty.
pub fn segment_sentences(body: &str) -> Vec<String> {
    let mut out = Vec::new();
    for para in split_paragraphs(body) {
        split_paragraph(para, &mut out);
    }
    out
}

fn split_paragraphs(body: &str) -> impl Iterator<Item = &str> {
    let mut paras = Vec::new();
    let mut start = 0;
    let mut offset = 0;
    let mut prev_blank = false;
    for line in body.split_inclusive('\n') {
        let blank = line.trim().is_empty();
        if blank && !prev_blank {
            paras.push(&body[start..offset]);
        }
        if blank {
            start = offset + line.len();
        }
        prev_blank = blank;
        offset += line.len();
    }
    paras.push(&body[start..]);
    paras.into_iter()
}

fn split_paragraph(para: &str, out: &mut Vec<String>) {
    let chars: Vec<(usize, char)> = para.char_indices().collect();
    let mut start = 0;
    let mut i = 0;
    while i < chars.len() {
        let (_, c) = chars[i];
        if !matches!(c, '.' | '!' | '?') {
            i += 1;
            continue;
        }
        let mut end = i + 1;
        while end < chars.len() && (matches!(chars[end].1, '.' | '!' | '?') || is_closer(chars[end].1)) {
            end += 1;
        }
        let mut next = end;
        while next < chars.len() && chars[next].1.is_whitespace() {
            next += 1;
        }
        let boundary = next == chars.len() || (next > end && chars[next].1.is_uppercase());
        if boundary {
            let byte_end = chars.get(end).map_or(para.len(), |&(b, _)| b);
            push_trimmed(&para[start..byte_end], out);
            start = byte_end;
        }
        i = end;
    }
    push_trimmed(&para[start..], out);
}

fn push_trimmed(s: &str, out: &mut Vec<String>) {
    let t = s.trim();
    if !t.is_empty() {
        out.push(t.to_owned());
    }
}

/// Lowercase, split on whitespace, and detach leading and trailing
/// punctuation characters as one-character tokens. Internal punctuation
/// (hyphens, periods, apostrophes, digits) stays inside the token.
pub fn tokenize(sentence: &str) -> Vec<String> {
    let lower = sentence.to_lowercase();
    let mut out = Vec::new();
    for chunk in lower.split_whitespace() {
        let head_end = chunk
            .char_indices()
            .find(|(_, c)| c.is_alphanumeric())
            .map_or(chunk.len(), |(i, _)| i);
        out.extend(chunk[..head_end].chars().map(String::from));
        let body = &chunk[head_end..];
        if body.is_empty() {
            continue;
        }
        let tail_start = body
            .char_indices()
            .rev()
            .find(|(_, c)| c.is_alphanumeric())
            .map_or(0, |(i, c)| i + c.len_utf8());
        out.push(body[..tail_start].to_owned());
        out.extend(body[tail_start..].chars().map(String::from));
    }
    out
}

/// First line of a normalized sentence file.
pub fn sentence_file_header(stops: &StopwordSet) -> String {
    format!(
        "#hyperex-sentences\tnorm={}\tstopwords={}",
        NORMALIZATION_VERSION,
        stops.fingerprint()
    )
}

/// Writes the `title<TAB>sentence` stage file. A document without any
/// sentence is recorded as a single `title<TAB>` line so that it still counts
/// as a document downstream.
pub struct SentenceWriter<W: Write> {
    out: W,
    pub documents: usize,
    pub sentences: usize,
}

impl<W: Write> SentenceWriter<W> {
    pub fn new(mut out: W, stops: &StopwordSet) -> std::io::Result<Self> {
        writeln!(out, "{}", sentence_file_header(stops))?;
        Ok(SentenceWriter {
            out,
            documents: 0,
            sentences: 0,
        })
    }

    pub fn write_document(&mut self, title: &str, sentences: &[NormalizedSentence]) -> std::io::Result<()> {
        let title = title.replace(['\t', '\n', '\r'], " ");
        self.documents += 1;
        let mut wrote = false;
        for s in sentences.iter().filter(|s| !s.is_empty()) {
            writeln!(self.out, "{title}\t{s}")?;
            self.sentences += 1;
            wrote = true;
        }
        if !wrote {
            writeln!(self.out, "{title}\t")?;
        }
        Ok(())
    }

    pub fn into_inner(self) -> W {
        self.out
    }
}

/// A document read back from a sentence file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SentenceDocument {
    pub title: String,
    /// Space-joined normalized tokens, one entry per sentence.
    pub sentences: Vec<String>,
}

impl SentenceDocument {
    pub fn normalized(&self) -> Vec<NormalizedSentence> {
        self.sentences
            .iter()
            .map(|s| NormalizedSentence::new(s.split(' ').map(str::to_owned).collect()))
            .collect()
    }
}

/// Parsed header of a sentence file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SentenceHeader {
    pub norm_version: u32,
    pub stopwords: String,
}

pub fn parse_sentence_header(line: &str) -> Result<SentenceHeader> {
    let mut fields = line.trim_end().split('\t');
    if fields.next() != Some("#hyperex-sentences") {
        return Err(Error::format(
            1,
            "not a sentence file (missing #hyperex-sentences header)",
        ));
    }
    let mut norm = None;
    let mut stopwords = None;
    for f in fields {
        if let Some(v) = f.strip_prefix("norm=") {
            norm = v.parse().ok();
        } else if let Some(v) = f.strip_prefix("stopwords=") {
            stopwords = Some(v.to_owned());
        }
    }
    match (norm, stopwords) {
        (Some(norm_version), Some(stopwords)) => Ok(SentenceHeader {
            norm_version,
            stopwords,
        }),
        _ => Err(Error::format(1, "sentence file header lacks norm= or stopwords=")),
    }
}

/// Reads a sentence file document by document. Consecutive lines with the
/// same title belong to one document.
pub struct SentenceReader<R> {
    reader: R,
    pub header: SentenceHeader,
    line_no: usize,
    pending: Option<(String, String)>,
    buf: String,
}

impl<R: BufRead> SentenceReader<R> {
    pub fn new(mut reader: R) -> Result<Self> {
        let mut first = String::new();
        reader
            .read_line(&mut first)
            .map_err(|e| Error::Input(format!("reading sentence file: {e}")))?;
        let header = parse_sentence_header(&first)?;
        Ok(SentenceReader {
            reader,
            header,
            line_no: 1,
            pending: None,
            buf: String::new(),
        })
    }

    fn next_line(&mut self) -> Result<Option<(String, String)>> {
        self.buf.clear();
        let n = self
            .reader
            .read_line(&mut self.buf)
            .map_err(|e| Error::Input(format!("reading sentence file: {e}")))?;
        if n == 0 {
            return Ok(None);
        }
        self.line_no += 1;
        let line = self.buf.trim_end_matches(['\n', '\r']);
        let (title, sentence) = line
            .split_once('\t')
            .ok_or_else(|| Error::format(self.line_no, "expected title<TAB>sentence"))?;
        Ok(Some((title.to_owned(), sentence.to_owned())))
    }

    fn read_document(&mut self) -> Result<Option<SentenceDocument>> {
        let first = match self.pending.take() {
            Some(p) => p,
            None => match self.next_line()? {
                Some(p) => p,
                None => return Ok(None),
            },
        };
        let title = first.0;
        let mut sentences = Vec::new();
        if !first.1.is_empty() {
            sentences.push(first.1);
        }
        while let Some((t, s)) = self.next_line()? {
            if t != title {
                self.pending = Some((t, s));
                break;
            }
            if !s.is_empty() {
                sentences.push(s);
            }
        }
        Ok(Some(SentenceDocument { title, sentences }))
    }
}

impl<R: BufRead> Iterator for SentenceReader<R> {
    type Item = Result<SentenceDocument>;

    fn next(&mut self) -> Option<Self::Item> {
        self.read_document().transpose()
    }
}
