// Browser-side transport: WebSocket to the byte pipe started by
// `npm run bridge`, which forwards lines to the TCP service unchanged.

import { LineTransport, createLineSplitter } from "./protocol.js"

export const connectWebSocket = (url: string): Promise<LineTransport> =>
  new Promise((resolve, reject) => {
    const ws = new WebSocket(url)
    const lineHandlers: Array<(line: string) => void> = []
    const closeHandlers: Array<() => void> = []
    const splitter = createLineSplitter((line) => {
      for (const h of lineHandlers) h(line)
    })
    ws.onmessage = (e) => splitter.push(String(e.data))
    ws.onclose = () => {
      for (const h of closeHandlers) h()
    }
    ws.onerror = () => reject(new Error(`cannot reach ${url}`))
    ws.onopen = () =>
      resolve({
        send: (line) => ws.send(line),
        onLine: (cb) => void lineHandlers.push(cb),
        onClose: (cb) => void closeHandlers.push(cb),
        close: () => ws.close(),
      })
  })
