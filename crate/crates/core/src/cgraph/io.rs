//! Graph files.
//!
//! The native format is a text file of three CSV tables introduced by
//! `[as]`, `[ixp]` and `[edges]` section lines, preceded by `#` header lines
//! carrying the snapshot date and beta parameters:
//!
//! ```text
//! # peergraph graph v1
//! # date=2020-01-01
//! # beta_b=0 beta_m=0.75 beta_h=0.95
//! [as]
//! asn,name,info_ratio,info_scope,info_type
//! 15169,Google LLC,MO,Global,Content
//! [ixp]
//! ixp_id,name,country
//! 1,DE-CIX Frankfurt,DE
//! [edges]
//! as_id,ixp_id,ps,class
//! 15169,1,100000,MO
//! ```

use std::collections::BTreeMap;
use std::io::{Read, Write};

use chrono::NaiveDate;

use super::{node_metrics, BetaParams, CGraph};
use crate::ingest::{IxpRecord, NetworkRecord, TrafficClass};
use crate::{Error, Result};

const MAGIC: &str = "# peergraph graph v1";

fn io_err(e: std::io::Error) -> Error {
    Error::io("<graph stream>", e)
}

fn clean(s: &str) -> String {
    s.replace(['\n', '\r'], " ")
}

pub fn write_graph(g: &CGraph, mut out: impl Write) -> Result<()> {
    writeln!(out, "{MAGIC}").map_err(io_err)?;
    if let Some(d) = g.date {
        writeln!(out, "# date={d}").map_err(io_err)?;
    }
    let b = g.beta();
    writeln!(out, "# beta_b={} beta_m={} beta_h={}", b.beta_b, b.beta_m, b.beta_h).map_err(io_err)?;

    writeln!(out, "[as]").map_err(io_err)?;
    let mut w = csv::Writer::from_writer(&mut out);
    w.write_record(["asn", "name", "info_ratio", "info_scope", "info_type"])?;
    for n in g.as_nodes() {
        w.write_record([
            n.asn.to_string(),
            clean(&n.name),
            n.info_ratio.code().to_string(),
            clean(&n.info_scope),
            clean(&n.info_type),
        ])?;
    }
    w.flush().map_err(io_err)?;
    drop(w);

    writeln!(out, "[ixp]").map_err(io_err)?;
    let mut w = csv::Writer::from_writer(&mut out);
    w.write_record(["ixp_id", "name", "country"])?;
    for x in g.ixp_nodes() {
        w.write_record([x.ixp_id.to_string(), clean(&x.name), x.country.clone()])?;
    }
    w.flush().map_err(io_err)?;
    drop(w);

    writeln!(out, "[edges]").map_err(io_err)?;
    write_edge_table(g, &mut out)
}

fn write_edge_table(g: &CGraph, out: impl Write) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["as_id", "ixp_id", "ps", "class"])?;
    for e in g.edges() {
        let n = &g.as_nodes()[e.as_index];
        w.write_record([
            n.asn.to_string(),
            g.ixp_nodes()[e.ixp_index].ixp_id.to_string(),
            e.ps.to_string(),
            n.info_ratio.code().to_string(),
        ])?;
    }
    w.flush().map_err(io_err)
}

/// Plain `as_id,ixp_id,ps,class` edge list.
pub fn write_edgelist(g: &CGraph, out: impl Write) -> Result<()> {
    write_edge_table(g, out)
}

/// Directed weights as `source,target,weight`, one row per non-zero entry
/// of `W` (link `source -> target`).
pub fn write_weight_csv(g: &CGraph, out: impl Write) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["source", "target", "weight"])?;
    for (row, col, weight) in g.weight_triplets() {
        w.write_record([
            g.node_id(col).to_string(),
            g.node_id(row).to_string(),
            weight.to_string(),
        ])?;
    }
    w.flush().map_err(io_err)
}

pub fn read_graph(mut input: impl Read) -> Result<CGraph> {
    let mut text = String::new();
    input.read_to_string(&mut text).map_err(io_err)?;
    let bad = |m: String| Error::MalformedGraph(m);

    let mut lines = text.lines();
    if lines.next().map(str::trim) != Some(MAGIC) {
        return Err(bad("missing header line".into()));
    }
    let mut date = None;
    let mut beta = BetaParams::default();
    let mut sections: BTreeMap<String, String> = BTreeMap::new();
    let mut current: Option<String> = None;
    for line in lines {
        if let Some(h) = line.strip_prefix('#') {
            for kv in h.split_whitespace() {
                let Some((k, v)) = kv.split_once('=') else { continue };
                let num = || v.parse::<f64>().map_err(|_| bad(format!("bad value in {kv}")));
                match k {
                    "date" => {
                        date = Some(NaiveDate::parse_from_str(v, "%Y-%m-%d").map_err(|_| bad(format!("bad date {v}")))?)
                    }
                    "beta_b" => beta.beta_b = num()?,
                    "beta_m" => beta.beta_m = num()?,
                    "beta_h" => beta.beta_h = num()?,
                    _ => {}
                }
            }
        } else if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
            current = Some(name.to_string());
            sections.entry(name.to_string()).or_default();
        } else if let Some(sec) = &current {
            let body = sections.get_mut(sec).expect("section registered");
            body.push_str(line);
            body.push('\n');
        } else if !line.trim().is_empty() {
            return Err(bad(format!("content before first section: {line}")));
        }
    }
    let beta = BetaParams::new(beta.beta_b, beta.beta_m, beta.beta_h)?;
    let table = |name: &str| -> Result<Vec<csv::StringRecord>> {
        let body = sections
            .get(name)
            .ok_or_else(|| bad(format!("missing [{name}] section")))?;
        let mut r = csv::Reader::from_reader(body.as_bytes());
        Ok(r.records().collect::<std::result::Result<Vec<_>, _>>()?)
    };
    let field = |rec: &csv::StringRecord, i: usize| -> Result<String> {
        rec.get(i)
            .map(str::to_string)
            .ok_or_else(|| bad(format!("short row {:?}", rec)))
    };
    let int = |rec: &csv::StringRecord, i: usize| -> Result<u32> {
        field(rec, i)?
            .trim()
            .parse()
            .map_err(|_| bad(format!("bad integer in row {:?}", rec)))
    };

    let mut as_nodes = Vec::new();
    for rec in table("as")? {
        let code = field(&rec, 2)?;
        as_nodes.push(NetworkRecord {
            asn: int(&rec, 0)?,
            name: field(&rec, 1)?,
            info_ratio: TrafficClass::from_code(&code).ok_or_else(|| bad(format!("unknown class {code}")))?,
            info_scope: field(&rec, 3)?,
            info_type: field(&rec, 4)?,
        });
    }
    let mut ixp_nodes = Vec::new();
    for rec in table("ixp")? {
        ixp_nodes.push(IxpRecord {
            ixp_id: int(&rec, 0)?,
            name: field(&rec, 1)?,
            country: field(&rec, 2)?,
        });
    }
    let mut edges = Vec::new();
    for rec in table("edges")? {
        let ps: f64 = field(&rec, 2)?
            .parse()
            .map_err(|_| bad(format!("bad port size in row {:?}", rec)))?;
        edges.push((int(&rec, 0)?, int(&rec, 1)?, ps));
    }
    let mut g = CGraph::from_parts(as_nodes, ixp_nodes, &edges, beta)?;
    g.date = date;
    Ok(g)
}

fn xml_escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c if (c as u32) < 0x20 && c != '\t' => out.push(' '),
            c => out.push(c),
        }
    }
    out
}

/// GEXF 1.3 export for graph viewers. Node attributes: `type`, `country`,
/// `port_capacity`, `info_ratio`; one directed edge per non-zero weight.
/// AS countries come from `as_country` when given, IXP countries from the
/// graph.
pub fn write_gexf(g: &CGraph, as_country: Option<&BTreeMap<u32, String>>, mut out: impl Write) -> Result<()> {
    let m = node_metrics(g);
    let mut s = String::new();
    s.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    s.push_str("<gexf xmlns=\"http://gexf.net/1.3\" version=\"1.3\">\n");
    s.push_str("  <graph mode=\"static\" defaultedgetype=\"directed\">\n");
    s.push_str("    <attributes class=\"node\">\n");
    s.push_str("      <attribute id=\"0\" title=\"type\" type=\"string\"/>\n");
    s.push_str("      <attribute id=\"1\" title=\"country\" type=\"string\"/>\n");
    s.push_str("      <attribute id=\"2\" title=\"port_capacity\" type=\"double\"/>\n");
    s.push_str("      <attribute id=\"3\" title=\"info_ratio\" type=\"string\"/>\n");
    s.push_str("    </attributes>\n    <nodes>\n");
    for i in 0..g.n() {
        let id = g.node_id(i);
        let (country, ratio) = if g.is_as(i) {
            let n = &g.as_nodes()[i];
            let c = as_country.and_then(|m| m.get(&n.asn)).cloned().unwrap_or_default();
            (c, n.info_ratio.code())
        } else {
            (g.ixp_nodes()[i - g.n_as()].country.clone(), "")
        };
        s.push_str(&format!(
            "      <node id=\"{id}\" label=\"{}\">\n        <attvalues>\
             <attvalue for=\"0\" value=\"{}\"/>\
             <attvalue for=\"1\" value=\"{}\"/>\
             <attvalue for=\"2\" value=\"{}\"/>\
             <attvalue for=\"3\" value=\"{ratio}\"/></attvalues>\n      </node>\n",
            xml_escape(g.node_name(i)),
            id.kind(),
            xml_escape(&country),
            m.port_capacity[i],
        ));
    }
    s.push_str("    </nodes>\n    <edges>\n");
    for (k, (row, col, w)) in g.weight_triplets().into_iter().enumerate() {
        s.push_str(&format!(
            "      <edge id=\"{k}\" source=\"{}\" target=\"{}\" weight=\"{w}\"/>\n",
            g.node_id(col),
            g.node_id(row),
        ));
    }
    s.push_str("    </edges>\n  </graph>\n</gexf>\n");
    out.write_all(s.as_bytes()).map_err(io_err)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cgraph::tests::{ixp, net};

    fn sample() -> CGraph {
        let mut a = net(10, TrafficClass::HeavyOutbound);
        a.name = "Quote \"and\", comma".into();
        let mut g = CGraph::from_parts(
            vec![a, net(20, TrafficClass::MostlyInbound)],
            vec![ixp(1, "DE"), ixp(2, "")],
            &[(10, 1, 100.0), (20, 1, 2.5), (20, 2, 1e5)],
            BetaParams::new(0.0, 0.7, 0.9).unwrap(),
        )
        .unwrap();
        g.date = NaiveDate::from_ymd_opt(2021, 3, 1);
        g
    }

    #[test]
    fn native_round_trip() {
        let g = sample();
        let mut buf = Vec::new();
        write_graph(&g, &mut buf).unwrap();
        let back = read_graph(buf.as_slice()).unwrap();
        assert_eq!(back, g);
    }

    #[test]
    fn rejects_garbage() {
        assert!(read_graph("hello".as_bytes()).is_err());
        let missing = format!("{MAGIC}\n[as]\nasn,name,info_ratio,info_scope,info_type\n");
        assert!(matches!(read_graph(missing.as_bytes()), Err(Error::MalformedGraph(_))));
    }

    #[test]
    fn gexf_lists_both_directions() {
        let g = sample();
        let mut buf = Vec::new();
        write_gexf(&g, None, &mut buf).unwrap();
        let s = String::from_utf8(buf).unwrap();
        assert_eq!(s.matches("<node ").count(), 4);
        assert_eq!(s.matches("<edge ").count(), 6);
        assert!(s.contains("source=\"AS10\" target=\"IX1\" weight=\"100\""));
        assert!(s.contains("&quot;and&quot;"));
    }
}
