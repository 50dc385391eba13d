//! Client for a LaTeXML-style rendering service, plus a local stand-in.
//!
//! Request: `POST <endpoint>` with the semantic LaTeX as a `text/plain`
//! body. Response: a `math` element whose `semantics` child holds the
//! presentation MathML first and the content MathML in an
//! `annotation-xml encoding="MathML-Content"` element.

use std::io::{BufRead, BufReader, Read, Write};
use std::net::{SocketAddr, TcpListener, TcpStream};
use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};
use std::sync::Arc;
use std::thread::JoinHandle;
use std::time::Duration;

use quick_xml::escape::escape;
use quick_xml::events::Event;
use quick_xml::Reader;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RenderedMath {
    pub presentation: String,
    pub content: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RenderError {
    #[error("rendering service unreachable: {0}")]
    ServiceUnreachable(String),
    #[error("rendering service rejected the formula ({status}): {body}")]
    ServiceRejected { status: u16, body: String },
    #[error("malformed rendering response: {0}")]
    Malformed(String),
}

pub fn request_mathml(semantic_latex: &str, endpoint: &str) -> Result<RenderedMath, RenderError> {
    let agent: ureq::Agent = ureq::Agent::config_builder()
        .timeout_global(Some(Duration::from_secs(10)))
        .http_status_as_error(false)
        .build()
        .into();
    let mut resp = agent
        .post(endpoint)
        .header("Content-Type", "text/plain; charset=utf-8")
        .send(semantic_latex)
        .map_err(|e| RenderError::ServiceUnreachable(e.to_string()))?;
    let status = resp.status().as_u16();
    let body = resp
        .body_mut()
        .read_to_string()
        .map_err(|e| RenderError::ServiceUnreachable(e.to_string()))?;
    if status != 200 {
        return Err(RenderError::ServiceRejected { status, body });
    }
    parse_response(&body)
}

/// Raw text from the reader's position up to the end tag closing `name`.
fn element_inner<'a>(
    xml: &'a str,
    r: &mut Reader<&[u8]>,
    name: &str,
) -> Result<&'a str, RenderError> {
    let bad = |e: quick_xml::Error| RenderError::Malformed(e.to_string());
    let start = r.buffer_position() as usize;
    let mut depth = 0usize;
    loop {
        let before = r.buffer_position() as usize;
        match r.read_event().map_err(bad)? {
            Event::Start(_) => depth += 1,
            Event::End(e) if depth == 0 && e.name().as_ref() == name => {
                return Ok(&xml[start..before])
            }
            Event::End(_) => depth -= 1,
            Event::Eof => return Err(RenderError::Malformed("unexpected end of response".into())),
            _ => {}
        }
    }
}

pub fn parse_response(xml: &str) -> Result<RenderedMath, RenderError> {
    let bad = |e: quick_xml::Error| RenderError::Malformed(e.to_string());
    let mut r = Reader::from_str(xml);
    // find <semantics>
    loop {
        match r.read_event().map_err(bad)? {
            Event::Start(e) if e.local_name().as_ref() == "semantics" => break,
            Event::Eof => return Err(RenderError::Malformed("no semantics element".into())),
            _ => {}
        }
    }
    let mut presentation = None;
    let mut content = None;
    loop {
        let before = r.buffer_position() as usize;
        match r.read_event().map_err(bad)? {
            Event::Start(e) if e.local_name().as_ref() == "annotation-xml" => {
                let enc = e
                    .try_get_attribute("encoding")
                    .map_err(|e| RenderError::Malformed(e.to_string()))?;
                let is_content = enc.is_some_and(|a| a.value.as_ref() == "MathML-Content");
                let name = e.name().as_ref().to_owned();
                let inner = element_inner(xml, &mut r, &name)?;
                if is_content {
                    content = Some(inner.trim().to_owned());
                }
            }
            Event::Start(e) if presentation.is_none() => {
                let name = e.name().as_ref().to_owned();
                element_inner(xml, &mut r, &name)?;
                presentation = Some(xml[before..r.buffer_position() as usize].trim().to_owned());
            }
            Event::Empty(_) if presentation.is_none() => {
                presentation = Some(xml[before..r.buffer_position() as usize].trim().to_owned());
            }
            Event::End(e) if e.local_name().as_ref() == "semantics" => break,
            Event::Eof => {
                return Err(RenderError::Malformed(
                    "unterminated semantics element".into(),
                ))
            }
            _ => {}
        }
    }
    match (presentation, content) {
        (Some(presentation), Some(content)) => Ok(RenderedMath {
            presentation,
            content,
        }),
        (None, _) => Err(RenderError::Malformed("no presentation MathML".into())),
        (_, None) => Err(RenderError::Malformed("no content MathML".into())),
    }
}

/// Canned answer of [`MockRenderService`].
pub fn mock_mathml(latex: &str) -> String {
    let head = latex
        .strip_prefix('\\')
        .map(|s| {
            s.split(|c: char| !c.is_ascii_alphabetic())
                .next()
                .unwrap_or("")
        })
        .unwrap_or("");
    let op = if head.is_empty() { "formula" } else { head };
    let tex = escape(latex);
    format!(
        "<math xmlns=\"http://www.w3.org/1998/Math/MathML\" alttext=\"{tex}\"><semantics>\
         <mrow><mi>{op}</mi><mtext>{tex}</mtext></mrow>\
         <annotation-xml encoding=\"MathML-Content\"><apply><csymbol cd=\"semtex-mock\">{op}</csymbol><cn type=\"tex\">{tex}</cn></apply></annotation-xml>\
         </semantics></math>"
    )
}

/// A minimal HTTP server answering rendering requests with canned MathML,
/// for tests and offline demos. An empty body is rejected with 400.
pub struct MockRenderService {
    addr: SocketAddr,
    stop: Arc<AtomicBool>,
    served: Arc<AtomicUsize>,
    handle: Option<JoinHandle<()>>,
}

impl MockRenderService {
    pub fn start() -> std::io::Result<Self> {
        Self::bind("127.0.0.1:0")
    }

    pub fn bind(addr: &str) -> std::io::Result<Self> {
        let listener = TcpListener::bind(addr)?;
        let addr = listener.local_addr()?;
        let stop = Arc::new(AtomicBool::new(false));
        let served = Arc::new(AtomicUsize::new(0));
        let (flag, count) = (stop.clone(), served.clone());
        let handle = std::thread::spawn(move || {
            for conn in listener.incoming() {
                if flag.load(Ordering::SeqCst) {
                    break;
                }
                if let Ok(stream) = conn {
                    count.fetch_add(1, Ordering::SeqCst);
                    let _ = serve(stream);
                }
            }
        });
        Ok(MockRenderService {
            addr,
            stop,
            served,
            handle: Some(handle),
        })
    }

    pub fn endpoint(&self) -> String {
        format!("http://{}/convert", self.addr)
    }

    /// Connections accepted so far.
    pub fn requests(&self) -> usize {
        self.served.load(Ordering::SeqCst)
    }

    /// Blocks serving until the process ends.
    pub fn wait(mut self) {
        if let Some(h) = self.handle.take() {
            let _ = h.join();
        }
    }
}

impl Drop for MockRenderService {
    fn drop(&mut self) {
        self.stop.store(true, Ordering::SeqCst);
        // wake the accept loop
        let _ = TcpStream::connect(self.addr);
        if let Some(h) = self.handle.take() {
            let _ = h.join();
        }
    }
}

fn serve(stream: TcpStream) -> std::io::Result<()> {
    stream.set_read_timeout(Some(Duration::from_secs(5)))?;
    let mut reader = BufReader::new(stream.try_clone()?);
    let mut line = String::new();
    reader.read_line(&mut line)?;
    let post = line.starts_with("POST ");
    let mut length = 0usize;
    loop {
        line.clear();
        if reader.read_line(&mut line)? == 0 || line.trim_end().is_empty() {
            break;
        }
        if let Some((k, v)) = line.split_once(':') {
            if k.trim().eq_ignore_ascii_case("content-length") {
                length = v.trim().parse().unwrap_or(0);
            }
        }
    }
    let mut body = vec![0; length];
    reader.read_exact(&mut body)?;
    let body = String::from_utf8_lossy(&body);
    let (status, text) = match (post, body.trim()) {
        (false, _) => ("405 Method Not Allowed", "POST a formula\n".to_owned()),
        (true, "") => ("400 Bad Request", "empty formula\n".to_owned()),
        (true, tex) => ("200 OK", mock_mathml(tex)),
    };
    let mut w = stream;
    write!(w, "HTTP/1.1 {status}\r\nContent-Type: application/xml; charset=utf-8\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{text}", text.len())?;
    w.flush()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_latexml_shape() {
        let xml = r#"<math xmlns="http://www.w3.org/1998/Math/MathML"><semantics><mrow><mi mathvariant="normal">Γ</mi><mo>⁡</mo><mrow><mo>(</mo><mi>z</mi><mo>)</mo></mrow></mrow><annotation-xml encoding="MathML-Content"><apply><csymbol cd="dlmf">Gamma</csymbol><ci>z</ci></apply></annotation-xml><annotation encoding="application/x-tex">\EulerGamma@{z}</annotation></semantics></math>"#;
        let r = parse_response(xml).unwrap();
        assert!(r
            .presentation
            .starts_with("<mrow><mi mathvariant=\"normal\">Γ</mi>"));
        assert!(r.presentation.ends_with("</mrow>"));
        assert_eq!(
            r.content,
            r#"<apply><csymbol cd="dlmf">Gamma</csymbol><ci>z</ci></apply>"#
        );
    }

    #[test]
    fn content_required() {
        let xml = "<math><semantics><mi>x</mi></semantics></math>";
        assert_eq!(
            parse_response(xml),
            Err(RenderError::Malformed("no content MathML".into()))
        );
        assert!(matches!(
            parse_response("<math><semantics><mi>x</semantics>"),
            Err(RenderError::Malformed(_))
        ));
    }

    #[test]
    fn mock_answer_parses() {
        let r = parse_response(&mock_mathml(r"\EulerGamma@{z}<1")).unwrap();
        assert_eq!(
            r.presentation,
            r"<mrow><mi>EulerGamma</mi><mtext>\EulerGamma@{z}&lt;1</mtext></mrow>"
        );
        assert!(r
            .content
            .contains("<csymbol cd=\"semtex-mock\">EulerGamma</csymbol>"));
    }
}
