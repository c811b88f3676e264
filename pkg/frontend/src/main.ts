// Page wiring: one session, one WebSocket, chat on the left, viewport on
// the right. All state derives from server events; a reconnect (or an
// additive delta) reconciles through GET /scene.

import { ApiClient, type ServerEvent, type TurnOutcome } from './api'
import { ChatPanel } from './chat'
import { FeedbackDialog } from './feedback'
import { SceneStore } from './sceneStore'
import { Viewport } from './viewport'

async function boot(): Promise<void> {
  const api = new ApiClient(window.location.origin)
  const store = new SceneStore()
  const viewport = new Viewport()

  const chatRoot = document.getElementById('chat')!
  const viewportRoot = document.getElementById('viewport')!
  const dialogRoot = document.getElementById('feedback')!

  const refetch = async () => {
    const snapshot = await api.scene()
    store.replace(snapshot)
    chat.renderRules(snapshot.session.rules)
  }

  const showOutcome = (outcome: TurnOutcome) => {
    chat.renderOutcome(outcome)
  }

  const dialog = new FeedbackDialog(dialogRoot, async (turn, corrected, operation) => {
    try {
      const rerun = await api.feedback(turn, corrected, operation)
      chat.addBubble('system', 'correction recorded; re-running the turn')
      showOutcome(rerun)
      await refetch()
    } catch (error) {
      chat.addBubble('error', String(error))
    }
  })

  const guard = (work: () => Promise<void>) => {
    work().catch((error) => chat.addBubble('error', String(error)))
  }

  const chat = new ChatPanel(chatRoot, {
    onSend: (text) => guard(async () => {
      showOutcome(await api.message(text))
      await refetch()
    }),
    onSelect: (index) => guard(async () => {
      showOutcome(await api.select(index))
      await refetch()
    }),
    onApply: (ruleId) => guard(async () => {
      showOutcome(await api.applyRule(ruleId))
      await refetch()
    }),
    onRevert: (ruleId) => guard(async () => {
      showOutcome(await api.revertRule(ruleId))
      await refetch()
    }),
    onFeedback: (outcome) => dialog.open(outcome),
  })

  store.onChange = () => viewport.update(store)
  viewport.attach(viewportRoot)

  await api.createSession()
  chat.addBubble('system',
    'Session ready. Try: "Populate the Au atom uniformly on a rectangle ' +
    'skeleton", then tune with "set the number of elements to 400", then ' +
    'press apply rule. Prefix with auto: for automatic mode, advice: for guidance.')
  await refetch()

  const connect = () => {
    const socket = new WebSocket(api.eventsUrl())
    socket.onmessage = (message) => {
      const event = JSON.parse(message.data) as ServerEvent
      if (event.type === 'scene-delta') {
        if (store.applyDelta(event)) void refetch()
      }
      // turn events are rendered by the request path that triggered them
    }
    socket.onclose = () => {
      // Reconnect and reconcile: the snapshot is the source of truth.
      setTimeout(() => {
        void refetch()
        connect()
      }, 1000)
    }
  }
  connect()
}

boot().catch((error) => {
  document.body.textContent = `failed to start: ${error}`
})
