use std::net::SocketAddr;
use std::sync::Arc;

use anyhow::Context;
use clap::Args;
use scentplan_core::harness::http::{router, AppState, ADMIN_TOKEN_ENV};
use scentplan_core::harness::{Harness, StudyId};

use crate::{config, GlobalArgs};

#[derive(Debug, Args)]
pub struct ServeArgs {
    /// Only open this study for new sessions.
    #[arg(long, value_parser = crate::parse_study)]
    pub study: Option<StudyId>,
    #[arg(long, default_value = "127.0.0.1:8080")]
    pub addr: SocketAddr,
}

pub fn run(g: &GlobalArgs, args: ServeArgs) -> anyhow::Result<()> {
    let ws = config::workspace(g)?;
    let mut configs = config::studies(&ws, g.seed)?;
    if let Some(study) = args.study {
        configs.retain(|c| c.study_id == study);
    }
    let stimuli = config::stimuli(&ws, &configs)?;
    let harness = Arc::new(Harness::open(&ws.harness_dir(), configs.clone(), stimuli)?);
    let state = AppState {
        harness: harness.clone(),
        admin_token: std::env::var(ADMIN_TOKEN_ENV).ok().filter(|t| !t.is_empty()),
        export_dir: Some(ws.exports_dir()),
    };
    if state.admin_token.is_none() {
        eprintln!("warning: {ADMIN_TOKEN_ENV} is not set; export is disabled");
    }
    let runtime = tokio::runtime::Builder::new_multi_thread()
        .enable_all()
        .build()
        .context("cannot start the async runtime")?;
    runtime.block_on(async {
        let listener = tokio::net::TcpListener::bind(args.addr)
            .await
            .with_context(|| format!("cannot listen on {}", args.addr))?;
        let addr = listener.local_addr()?;
        println!("study harness listening on http://{addr}");
        for c in &configs {
            println!(
                "participant sessions: POST http://{addr}/api/session {{\"study_id\":\"{}\",\"participant_id\":\"…\"}}",
                c.study_id
            );
        }
        axum::serve(listener, router(state))
            .with_graceful_shutdown(async {
                let _ = tokio::signal::ctrl_c().await;
            })
            .await
            .context("server error")
    })?;
    harness.flush()?;
    println!("store flushed to {}", ws.harness_dir().display());
    Ok(())
}
