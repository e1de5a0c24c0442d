//! persona-probe: administer psychology questionnaires (PVQ, VSM, IPIP)
//! to chat endpoints under controlled perspectives, then analyze
//! controllability and value stability.
//!
//! Every subcommand is a client of the HTTP service. With `--server` it
//! talks to a running instance; otherwise it starts an embedded one on a
//! loopback port for the duration of the command.

mod perspective_arg;

use std::net::SocketAddr;
use std::time::Duration;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};

use persona_api_client::ApiClient;
use persona_protocol as proto;
use persona_server::{AppState, EndpointsFile};

#[derive(Parser)]
#[command(name = "persona-probe", version, about)]
struct Cli {
    /// Base URL of a running service; otherwise an embedded instance is
    /// started for this invocation.
    #[arg(long, global = true)]
    server: Option<String>,

    /// Data directory of the embedded instance (runs, caches, results).
    #[arg(long, global = true, default_value = "persona-data")]
    data_dir: String,

    /// Endpoint profiles file for the embedded instance.
    #[arg(long, global = true)]
    endpoints: Option<String>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the service in the foreground.
    Serve {
        #[arg(long, default_value = "127.0.0.1:7878")]
        addr: SocketAddr,
    },
    /// List the shipped questionnaires.
    Questionnaires,
    /// List the shipped context fixtures.
    Contexts,
    /// Render one prompt bundle without calling any model.
    Preview {
        #[arg(long, default_value = "pvq")]
        questionnaire: String,
        /// Item id; defaults to the first item.
        #[arg(long)]
        item: Option<String>,
        /// `none` | `category:<id>` | `high:<dim>[,..][;low:<dim>[,..]]` | `free:<text>`
        #[arg(long, default_value = "none")]
        perspective: String,
        /// system | user
        #[arg(long, default_value = "system")]
        channel: String,
        /// 2nd | 3rd
        #[arg(long, default_value = "2nd")]
        person: String,
        /// slight | high | extreme
        #[arg(long, default_value = "extreme")]
        intensity: String,
        /// Context fixture reference.
        #[arg(long, default_value = "none")]
        context: String,
        /// How many permutations to sample.
        #[arg(long, default_value_t = 1)]
        permutations: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Which sampled permutation to apply.
        #[arg(long, default_value_t = 0)]
        permutation_index: usize,
        /// Force permutation 0 to the original option order.
        #[arg(long)]
        identity_first: bool,
    },
    /// Submit an experiment config and wait for it to finish.
    Run {
        /// Path to the experiment config (TOML).
        config: String,
        /// Return immediately after submitting.
        #[arg(long)]
        no_wait: bool,
    },
    /// Resume an interrupted experiment.
    Resume {
        experiment_id: String,
        #[arg(long)]
        no_wait: bool,
    },
    /// Show the task counts of an experiment.
    Status { experiment_id: String },
    /// Emit tables and charts for a finished experiment.
    Report {
        experiment_id: String,
        #[arg(long, default_value_t = true)]
        tables: bool,
        #[arg(long, default_value_t = true)]
        charts: bool,
        /// Human-baselines JSON overriding the shipped constants.
        #[arg(long)]
        baselines: Option<String>,
    },
    /// Generate a conversation context by letting two endpoints talk.
    Simulate {
        /// Opening message of the simulated human.
        #[arg(long)]
        topic_seed: String,
        /// Endpoint id answering as the chatbot.
        #[arg(long)]
        chatbot: String,
        /// Endpoint id playing the human side.
        #[arg(long)]
        simulant: String,
        #[arg(long, default_value_t = 5)]
        exchanges: usize,
        #[arg(long)]
        label: String,
        /// Where to write the transcript (.msgs format).
        #[arg(long)]
        out: String,
    },
}

#[tokio::main]
async fn main() -> Result<()> {
    tracing_subscriber::fmt()
        .with_env_filter(
            tracing_subscriber::EnvFilter::try_from_default_env()
                .unwrap_or_else(|_| "persona=info,warn".into()),
        )
        .init();
    let cli = Cli::parse();

    let endpoints = match &cli.endpoints {
        Some(path) => {
            EndpointsFile::load(path)
                .map_err(anyhow::Error::msg)?
                .endpoints
        }
        None => Vec::new(),
    };

    if let Command::Serve { addr } = cli.command {
        let state = AppState::new(&cli.data_dir, endpoints);
        persona_server::serve(state, addr, |bound| println!("listening on http://{bound}"))
            .await
            .context("server failed")?;
        return Ok(());
    }

    // Every other command talks to a service.
    let client = match &cli.server {
        Some(url) => ApiClient::new(url.clone()),
        None => {
            let state = AppState::new(&cli.data_dir, endpoints.clone());
            let url = persona_server::spawn_ephemeral(state).await?;
            ApiClient::new(url)
        }
    };

    match cli.command {
        Command::Serve { .. } => unreachable!("handled above"),
        Command::Questionnaires => {
            for q in client.questionnaires().await? {
                println!(
                    "{}\t{} items, {} dimensions, {}-point scale\t{}",
                    q.id, q.items, q.dimensions, q.scale_points, q.name
                );
            }
        }
        Command::Contexts => {
            for name in client.contexts().await? {
                println!("{name}");
            }
        }
        Command::Preview {
            questionnaire,
            item,
            perspective,
            channel,
            person,
            intensity,
            context,
            permutations,
            seed,
            permutation_index,
            identity_first,
        } => {
            if permutation_index >= permutations {
                bail!("--permutation-index must be below --permutations");
            }
            let perspective = perspective_arg::parse(&perspective, &channel, &person, &intensity)?;
            let bundle = client
                .preview(&proto::PreviewRequest {
                    questionnaire_id: questionnaire,
                    item_id: item,
                    perspective,
                    context,
                    seed,
                    permutation_index,
                    identity_first,
                })
                .await?;
            print!("{}", persona_perspective::to_msgs(&bundle.messages));
            println!("--");
            println!(
                "candidates: {}",
                bundle
                    .candidate_answers
                    .iter()
                    .map(|c| format!("{}->{}", c.presented_label, c.original_option_index))
                    .collect::<Vec<_>>()
                    .join(" ")
            );
            println!("cue: {:?}", bundle.extraction.cue);
        }
        Command::Run { config, no_wait } => {
            let text = std::fs::read_to_string(&config)
                .with_context(|| format!("cannot read {config}"))?;
            let config = persona_runner::ExperimentConfig::from_toml(&text)?;
            let submitted = client.submit(&config).await?;
            println!(
                "submitted {} ({} tasks, digest {})",
                submitted.experiment_id, submitted.task_count, submitted.config_digest
            );
            if !no_wait {
                wait_for(&client, &submitted.experiment_id).await?;
            }
        }
        Command::Resume {
            experiment_id,
            no_wait,
        } => {
            let status = client.resume(&experiment_id).await?;
            println!("resumed {experiment_id}: {}", summarize(&status.summary));
            if !no_wait {
                wait_for(&client, &experiment_id).await?;
            }
        }
        Command::Status { experiment_id } => {
            let status = client.status(&experiment_id).await?;
            println!(
                "{}\t{}{}",
                status.experiment_id,
                summarize(&status.summary),
                if status.running { "\t(running)" } else { "" }
            );
        }
        Command::Report {
            experiment_id,
            tables,
            charts,
            baselines,
        } => {
            let baselines_json = match baselines {
                Some(path) => Some(
                    std::fs::read_to_string(&path)
                        .with_context(|| format!("cannot read {path}"))?,
                ),
                None => None,
            };
            let response = client
                .report(
                    &experiment_id,
                    &proto::ReportRequest {
                        tables,
                        charts,
                        baselines_json,
                    },
                )
                .await?;
            for f in response.files {
                println!("{f}");
            }
        }
        Command::Simulate {
            topic_seed,
            chatbot,
            simulant,
            exchanges,
            label,
            out,
        } => {
            let profile = |id: &str| {
                endpoints
                    .iter()
                    .find(|e| e.id == id)
                    .cloned()
                    .ok_or_else(|| anyhow::anyhow!("unknown endpoint '{id}' (use --endpoints)"))
            };
            let chatbot_side = persona_model_client::ConversationSide {
                endpoint: persona_model_client::HttpEndpoint::new(profile(&chatbot)?),
                system_prompt: None,
                invert_roles: false,
            };
            let simulant_side = persona_model_client::ConversationSide {
                endpoint: persona_model_client::HttpEndpoint::new(profile(&simulant)?),
                system_prompt: Some("You are simulating a human using a chatbot".to_string()),
                invert_roles: true,
            };
            let ctx = persona_perspective::simulate_conversation(
                &topic_seed,
                &chatbot_side,
                &simulant_side,
                exchanges,
                &label,
            )
            .await?;
            let persona_perspective::ContextSpec::Conversation { messages, .. } = &ctx else {
                bail!("simulation produced no conversation");
            };
            std::fs::write(&out, persona_perspective::to_msgs(messages))?;
            println!("wrote {out} ({} messages)", messages.len());
        }
    }
    Ok(())
}

fn summarize(s: &proto::StatusSummary) -> String {
    format!(
        "total {} done {} pending {} failed {} refused {}",
        s.total, s.done, s.pending, s.failed, s.refused
    )
}

async fn wait_for(client: &ApiClient, experiment_id: &str) -> Result<()> {
    loop {
        let status = client.status(experiment_id).await?;
        if !status.running && status.summary.pending == 0 {
            println!("finished: {}", summarize(&status.summary));
            return Ok(());
        }
        if !status.running && status.summary.pending > 0 {
            // The run stopped early (failures beyond the retry budget).
            println!("stopped: {}", summarize(&status.summary));
            return Ok(());
        }
        tokio::time::sleep(Duration::from_millis(150)).await;
    }
}
