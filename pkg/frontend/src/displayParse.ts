// Display-only split of the service's canonical text into panel structure.
// No semantics here: every string is shown as received, never rewritten or
// re-evaluated; the service remains the single source of truth.

export interface StoreRow {
  variable: string
  history: string[] // oldest first; the last entry is the current binding
}

export interface RunnerPanel {
  endpoints: string[]
  process: string
  store: StoreRow[]
}

export interface MonitorPanel {
  endpoint: string
  past: string[] // executed actions, e.g. ["!int", "?bool"]
  future: string // remaining protocol, e.g. "?int.end"
  vars: string[]
  names: string[]
}

export interface ConfigView {
  restricted: string[]
  runners: RunnerPanel[]
  monitors: MonitorPanel[]
  nil: boolean
}

const splitList = (inner: string): string[] =>
  inner.trim() === "" ? [] : inner.split(",").map((s) => s.trim())

const parseStore = (inner: string): StoreRow[] => {
  const rows: StoreRow[] = []
  const re = /([A-Za-z_][A-Za-z0-9_]*)\s*=\s*\[([^\]]*)\]/g
  for (const m of inner.matchAll(re)) {
    rows.push({ variable: m[1]!, history: splitList(m[2]!) })
  }
  return rows
}

const parseRunner = (text: string): RunnerPanel => {
  const m = /^proc\[([^\]]*)\]\{\s*(.*?)\s*\}\s*store\{\s*(.*?)\s*\}$/.exec(text)
  if (!m) throw new Error(`unrecognized runner text: ${text}`)
  return {
    endpoints: splitList(m[1]!),
    process: m[2]!,
    store: parseStore(m[3]!),
  }
}

const parseMonitor = (text: string): MonitorPanel => {
  const m = /^mon\s+(\S+)\{\s*(.*?)\s*;\s*\[([^\]]*)\]\s*;\s*\[([^\]]*)\]\s*\}$/.exec(text)
  if (!m) throw new Error(`unrecognized monitor text: ${text}`)
  const [pastPart, futurePart = ""] = m[2]!.split("^")
  const past = pastPart!.split(".").map((s) => s.trim()).filter((s) => s !== "")
  return {
    endpoint: m[1]!,
    past,
    future: futurePart || "end",
    vars: splitList(m[3]!),
    names: splitList(m[4]!),
  }
}

export const parseCanonical = (text: string): ConfigView => {
  let body = text.trim()
  const restricted: string[] = []
  if (body === "0") return { restricted, runners: [], monitors: [], nil: true }
  const newMatch = /^new\(([^)]*)\)\.\s*/.exec(body)
  if (newMatch) {
    restricted.push(...splitList(newMatch[1]!))
    body = body.slice(newMatch[0].length)
    if (body.startsWith("(") && body.endsWith(")")) body = body.slice(1, -1)
  }
  const view: ConfigView = { restricted, runners: [], monitors: [], nil: false }
  for (const part of body.split(" | ")) {
    const component = part.trim()
    if (component.startsWith("proc[")) view.runners.push(parseRunner(component))
    else if (component.startsWith("mon ")) view.monitors.push(parseMonitor(component))
    else throw new Error(`unrecognized component: ${component}`)
  }
  return view
}

// Each monitor carries one establishment entry plus one per executed action.
export const monitorStacksConsistent = (view: ConfigView): boolean =>
  view.monitors.every(
    (m) => m.vars.length === m.past.length + 1 && m.names.length === m.past.length + 1,
  )
