// Wire types and client for the stepper service: newline-delimited JSON,
// one request per line, responses echo the request id.

export interface RedexLabel {
  endpoints: string[]
  service: string | null
}

export interface RedexInfo {
  key: string
  direction: "forward" | "backward"
  rule: string
  label: RedexLabel
  desc: string
}

export interface RedexListing {
  forward: RedexInfo[]
  backward: RedexInfo[]
}

export interface StepperResponse {
  id: number | null
  ok: boolean
  error?: string
  session?: string
  canonical?: string
  redexes?: RedexListing
}

export type StepperOp = "load" | "redexes" | "apply" | "reset"

export interface LineTransport {
  send(line: string): void
  onLine(cb: (line: string) => void): void
  onClose(cb: () => void): void
  close(): void
}

export const createLineSplitter = (onLine: (line: string) => void) => {
  let buffer = ""
  return {
    push(chunk: string) {
      buffer += chunk
      for (;;) {
        const idx = buffer.indexOf("\n")
        if (idx === -1) break
        const line = buffer.slice(0, idx).trim()
        buffer = buffer.slice(idx + 1)
        if (line) onLine(line)
      }
    },
  }
}

export class ServiceError extends Error {
  constructor(message: string) {
    super(message)
    this.name = "ServiceError"
  }

  get kind(): string {
    return this.message.split(":")[0] ?? ""
  }
}

export const isStale = (e: unknown): boolean =>
  e instanceof ServiceError && e.kind === "StaleRedex"

interface PendingRequest {
  id: number
  line: string
  resolve: (resp: StepperResponse) => void
  reject: (err: Error) => void
}

// Serializes requests: at most one on the wire, the rest queued in order.
export class StepperClient {
  private nextId = 1
  private waiting: PendingRequest[] = []
  private inflight: PendingRequest | null = null

  constructor(private transport: LineTransport) {
    transport.onLine((line) => {
      const cur = this.inflight
      this.inflight = null
      if (cur) {
        const resp = JSON.parse(line) as StepperResponse
        if (!resp.ok) cur.reject(new ServiceError(resp.error ?? "unknown service error"))
        else if (resp.id !== cur.id)
          cur.reject(new Error(`response id ${resp.id} for request ${cur.id}`))
        else cur.resolve(resp)
      }
      this.pump()
    })
    transport.onClose(() => {
      const dropped = [this.inflight, ...this.waiting.splice(0)]
      this.inflight = null
      for (const p of dropped) p?.reject(new Error("service connection closed"))
    })
  }

  private pump(): void {
    if (this.inflight || !this.waiting.length) return
    this.inflight = this.waiting.shift()!
    this.transport.send(this.inflight.line)
  }

  request(op: StepperOp, fields: Record<string, string> = {}): Promise<StepperResponse> {
    const id = this.nextId++
    const line = JSON.stringify({ id, op, ...fields }) + "\n"
    return new Promise((resolve, reject) => {
      this.waiting.push({ id, line, resolve, reject })
      this.pump()
    })
  }

  close(): void {
    this.transport.close()
  }
}
